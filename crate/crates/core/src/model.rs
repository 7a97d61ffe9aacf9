//! The JSON model format: named spaces, complexes, dglas, cdgas, sub-dglas, filtrations,
//! Artin algebras, morphisms, Cartan homotopies, sections and elements.
//!
//! Degrees are string keys, matrices are row-major lists of rows, vectors are sparse
//! `label -> "num/den"` maps. Every map is ordered, so emission is canonical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::artin::ArtinAlgebra;
use crate::cartan::CartanHomotopy;
use crate::complex::Complex;
use crate::dgla::{Dgla, DglaMorphism, SubDgla};
use crate::endo::EndDgla;
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::linalg::{self, Matrix, Vector};
use crate::period::{CdgaModel, FiltrationData};
use crate::scalar::{self, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

pub type SparseDoc = BTreeMap<String, String>;
/// Source degree -> row-major block.
pub type BlocksDoc = BTreeMap<String, Vec<Vec<String>>>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Degree -> basis labels.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dglas: BTreeMap<String, DglaDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cdgas: BTreeMap<String, CdgaDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subdglas: BTreeMap<String, SubDglaDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub filtrations: BTreeMap<String, FiltrationDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub artin: BTreeMap<String, ArtinDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MapDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cartan: BTreeMap<String, CartanDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sections: BTreeMap<String, SectionDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub elements: BTreeMap<String, ElementDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub space: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differential: BlocksDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub left: String,
    pub right: String,
    pub value: SparseDoc,
}

/// Either `end_of` a complex, or a space with differential and brackets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DglaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differential: BlocksDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<ProductDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_of: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CdgaDoc {
    pub space: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differential: BlocksDoc,
    pub products: Vec<ProductDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubDglaDoc {
    pub dgla: String,
    pub span: Vec<SparseDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDoc {
    /// A cdga or a space.
    pub on: String,
    /// Level `p` -> spanning vectors of `F^p`.
    pub levels: BTreeMap<String, Vec<SparseDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtinDoc {
    pub generators: usize,
    /// `m^order = 0`.
    pub order: usize,
    /// Explicit basis of `m_A`; absent for `K[ε_1..ε_k]/m^order`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<ArtinTableDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtinTableDoc {
    pub labels: Vec<String>,
    pub weights: Vec<usize>,
    pub products: Vec<ProductDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub source: String,
    pub target: String,
    /// Source label -> image; missing labels map to zero.
    pub images: BTreeMap<String, SparseDoc>,
}

/// `images` gives `i_a` in the target directly; `operators` gives `i_a` as an
/// endomorphism (base label -> image) when the target is `end_of` a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartanDoc {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<BTreeMap<String, SparseDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<BTreeMap<String, BTreeMap<String, SparseDoc>>>,
    /// Cdga whose derivations the operators must be; enables the contraction checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cdga: Option<String>,
    /// Filtration that `l` must preserve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionDoc {
    pub dgla: String,
    pub sub: String,
    pub span: Vec<SparseDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub dgla: String,
    /// Coefficients in `m_A`; labels are then `v|monomial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artin: Option<String>,
    pub value: SparseDoc,
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = pointer(&e.path().to_string());
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() {
                Error::Parse(inner.to_string())
            } else {
                Error::Schema { path, detail: inner.to_string() }
            }
        })?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema {
                path: "/schema_version".into(),
                detail: format!("unsupported version {}", doc.schema_version),
            });
        }
        Ok(doc)
    }

    /// Canonical pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

fn pointer(dotted: &str) -> String {
    if dotted == "." || dotted.is_empty() {
        return "/".into();
    }
    dotted.split('.').map(|s| format!("/{}", s.replace('[', "/").replace(']', ""))).collect()
}

fn schema(path: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), detail: detail.into() }
}

fn dangling(path: impl Into<String>, name: &str) -> Error {
    Error::Dangling { path: path.into(), name: name.to_string() }
}

fn parse_scalar(path: &str, s: &str) -> Result<Scalar> {
    scalar::parse(s).map_err(|e| schema(path, e.to_string()))
}

fn parse_degree(path: &str, s: &str) -> Result<i32> {
    s.parse().map_err(|_| schema(path, format!("degree key {s:?} is not an integer")))
}

fn vector(path: &str, space: &GradedSpace, doc: &SparseDoc) -> Result<Vector> {
    let mut v = linalg::zeros(space.dim());
    for (label, value) in doc {
        let p = format!("{path}/{label}");
        let k = space.find(label).ok_or_else(|| dangling(&p, label))?;
        v[k] = parse_scalar(&p, value)?;
    }
    Ok(v)
}

pub fn sparse_doc(space: &GradedSpace, v: &[Scalar]) -> SparseDoc {
    linalg::support(v).map(|(k, x)| (space.label(k).to_string(), scalar::format(x))).collect()
}

fn blocks(path: &str, space: &GradedSpace, doc: &BlocksDoc) -> Result<GradedMap> {
    let mut out = BTreeMap::new();
    for (key, rows) in doc {
        let p = format!("{path}/{key}");
        let deg = parse_degree(&p, key)?;
        let (r, c) = (space.dim_in(deg + 1), space.dim_in(deg));
        if rows.len() != r || rows.iter().any(|row| row.len() != c) {
            let found = format!("{}x{}", rows.len(), rows.first().map_or(0, |row| row.len()));
            return Err(schema(p, format!("block declared {r}x{c} by the space, found {found}")));
        }
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = parse_scalar(&format!("{p}/{i}/{j}"), x)?;
            }
        }
        out.insert(deg, m);
    }
    GradedMap::new(space.clone(), space.clone(), 1, out).map_err(|e| schema(path, e.to_string()))
}

fn products(path: &str, space: &GradedSpace, entries: &[ProductDoc]) -> Result<BTreeMap<(usize, usize), Vector>> {
    let mut out = BTreeMap::new();
    for (k, e) in entries.iter().enumerate() {
        let p = format!("{path}/{k}");
        let a = space.find(&e.left).ok_or_else(|| dangling(format!("{p}/left"), &e.left))?;
        let b = space.find(&e.right).ok_or_else(|| dangling(format!("{p}/right"), &e.right))?;
        if out.insert((a, b), vector(&format!("{p}/value"), space, &e.value)?).is_some() {
            return Err(schema(p, format!("duplicate entry ({}, {})", e.left, e.right)));
        }
    }
    Ok(out)
}

fn at(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        e @ (Error::Schema { .. } | Error::Dangling { .. } | Error::Parse(_)) => e,
        other => schema(path, other.to_string()),
    }
}

/// A resolved model: every reference checked, every structure constructed.
#[derive(Debug, Clone)]
pub struct Model {
    pub document: ModelDocument,
    pub spaces: BTreeMap<String, GradedSpace>,
    pub complexes: BTreeMap<String, Complex>,
    pub dglas: BTreeMap<String, Dgla>,
    /// Dglas declared as `end_of` a complex.
    pub ends: BTreeMap<String, EndDgla>,
    pub cdgas: BTreeMap<String, CdgaModel>,
    pub subdglas: BTreeMap<String, (String, SubDgla)>,
    pub filtrations: BTreeMap<String, (String, FiltrationData)>,
    pub artin: BTreeMap<String, ArtinAlgebra>,
    pub morphisms: BTreeMap<String, DglaMorphism>,
    pub cartan: BTreeMap<String, CartanHomotopy>,
    pub sections: BTreeMap<String, Section>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub dgla: String,
    pub sub: String,
    pub vectors: Vec<Vector>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, path: &str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| dangling(path, name))
}

impl Model {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::resolve(ModelDocument::from_json(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn resolve(doc: ModelDocument) -> Result<Self> {
        let mut spaces = BTreeMap::new();
        for (name, comps) in &doc.spaces {
            let p = format!("/spaces/{name}");
            let mut parsed = BTreeMap::new();
            for (key, labels) in comps {
                parsed.insert(parse_degree(&format!("{p}/{key}"), key)?, labels.clone());
            }
            spaces.insert(name.clone(), GradedSpace::new(parsed).map_err(at(p))?);
        }
        let mut complexes = BTreeMap::new();
        for (name, c) in &doc.complexes {
            let p = format!("/complexes/{name}");
            let s = lookup(&spaces, &format!("{p}/space"), &c.space)?;
            let d = blocks(&format!("{p}/differential"), s, &c.differential)?;
            complexes.insert(name.clone(), Complex::new(s.clone(), d).map_err(at(p))?);
        }
        let mut dglas = BTreeMap::new();
        let mut ends = BTreeMap::new();
        for (name, g) in &doc.dglas {
            let p = format!("/dglas/{name}");
            match (&g.end_of, &g.space) {
                (Some(c), None) if g.differential.is_empty() && g.brackets.is_empty() => {
                    let base = lookup(&complexes, &format!("{p}/end_of"), c)?;
                    let end = EndDgla::new(base).map_err(at(p))?;
                    dglas.insert(name.clone(), end.dgla().clone());
                    ends.insert(name.clone(), end);
                }
                (None, Some(sname)) => {
                    let s = lookup(&spaces, &format!("{p}/space"), sname)?;
                    let d = blocks(&format!("{p}/differential"), s, &g.differential)?;
                    let complex = Complex::new(s.clone(), d).map_err(at(format!("{p}/differential")))?;
                    let table = products(&format!("{p}/brackets"), s, &g.brackets)?;
                    dglas.insert(name.clone(), Dgla::new(complex, table).map_err(at(format!("{p}/brackets")))?);
                }
                _ => return Err(schema(p, "give either `end_of` alone or `space` with differential and brackets")),
            }
        }
        let mut cdgas = BTreeMap::new();
        for (name, c) in &doc.cdgas {
            let p = format!("/cdgas/{name}");
            let s = lookup(&spaces, &format!("{p}/space"), &c.space)?;
            let d = blocks(&format!("{p}/differential"), s, &c.differential)?;
            let complex = Complex::new(s.clone(), d).map_err(at(format!("{p}/differential")))?;
            let table = products(&format!("{p}/products"), s, &c.products)?;
            cdgas.insert(name.clone(), CdgaModel::new(complex, table).map_err(at(format!("{p}/products")))?);
        }
        let mut subdglas = BTreeMap::new();
        for (name, n) in &doc.subdglas {
            let p = format!("/subdglas/{name}");
            let g = lookup(&dglas, &format!("{p}/dgla"), &n.dgla)?;
            let spans = n
                .span
                .iter()
                .enumerate()
                .map(|(k, v)| vector(&format!("{p}/span/{k}"), g.space(), v))
                .collect::<Result<Vec<_>>>()?;
            subdglas.insert(name.clone(), (n.dgla.clone(), SubDgla::new(g.clone(), &spans).map_err(at(p))?));
        }
        let mut filtrations = BTreeMap::new();
        for (name, f) in &doc.filtrations {
            let p = format!("/filtrations/{name}");
            let space = match (cdgas.get(&f.on), spaces.get(&f.on)) {
                (Some(c), _) => c.space().clone(),
                (None, Some(s)) => s.clone(),
                _ => return Err(dangling(format!("{p}/on"), &f.on)),
            };
            let mut levels = BTreeMap::new();
            for (key, vs) in &f.levels {
                let lp = format!("{p}/levels/{key}");
                let vecs = vs
                    .iter()
                    .enumerate()
                    .map(|(k, v)| vector(&format!("{lp}/{k}"), &space, v))
                    .collect::<Result<Vec<_>>>()?;
                levels.insert(parse_degree(&lp, key)?, vecs);
            }
            let data = FiltrationData::new(space.dim(), levels).map_err(at(format!("{p}/levels")))?;
            filtrations.insert(name.clone(), (f.on.clone(), data));
        }
        let mut artin = BTreeMap::new();
        for (name, a) in &doc.artin {
            let p = format!("/artin/{name}");
            let alg = match &a.table {
                None => ArtinAlgebra::truncated_polynomial(a.generators, a.order).map_err(at(p))?,
                Some(t) => {
                    let space = GradedSpace::new(BTreeMap::from([(0, t.labels.clone())])).map_err(at(p.clone()))?;
                    let table = products(&format!("{p}/table/products"), &space, &t.products)?;
                    ArtinAlgebra::from_table(t.labels.clone(), t.weights.clone(), &table, a.order, a.generators)
                        .map_err(at(format!("{p}/table")))?
                }
            };
            artin.insert(name.clone(), alg);
        }
        let mut morphisms = BTreeMap::new();
        for (name, m) in &doc.morphisms {
            let p = format!("/morphisms/{name}");
            let g = lookup(&dglas, &format!("{p}/source"), &m.source)?;
            let h = lookup(&dglas, &format!("{p}/target"), &m.target)?;
            let images = images(&p, g.space(), h.space(), &m.images)?;
            let map =
                GradedMap::from_images(g.space().clone(), h.space().clone(), 0, &images).map_err(at(p.clone()))?;
            morphisms.insert(name.clone(), DglaMorphism::new(g.clone(), h.clone(), map).map_err(at(p))?);
        }
        let mut cartan = BTreeMap::new();
        for (name, c) in &doc.cartan {
            let p = format!("/cartan/{name}");
            let g = lookup(&dglas, &format!("{p}/source"), &c.source)?;
            let h = lookup(&dglas, &format!("{p}/target"), &c.target)?;
            let ims = match (&c.images, &c.operators) {
                (Some(ims), None) => images(&p, g.space(), h.space(), ims)?,
                (None, Some(ops)) => {
                    let end = ends
                        .get(&c.target)
                        .ok_or_else(|| schema(format!("{p}/operators"), "operators need an `end_of` target"))?;
                    let base = end.base().space();
                    let mut out = vec![linalg::zeros(h.dim()); g.dim()];
                    for (label, op) in ops {
                        let op_path = format!("{p}/operators/{label}");
                        let a = g.space().find(label).ok_or_else(|| dangling(&op_path, label))?;
                        let mut cols = vec![linalg::zeros(base.dim()); base.dim()];
                        for (src, img) in op {
                            let sp = format!("{op_path}/{src}");
                            let j = base.find(src).ok_or_else(|| dangling(&sp, src))?;
                            cols[j] = vector(&sp, base, img)?;
                        }
                        out[a] = end.from_images(&cols).map_err(at(op_path))?;
                    }
                    out
                }
                _ => return Err(schema(p, "give exactly one of `images` and `operators`")),
            };
            if let Some(cd) = &c.cdga {
                lookup(&cdgas, &format!("{p}/cdga"), cd)?;
            }
            if let Some(f) = &c.filtration {
                lookup(&filtrations, &format!("{p}/filtration"), f)?;
            }
            let map = GradedMap::from_images(g.space().clone(), h.space().clone(), -1, &ims).map_err(at(p.clone()))?;
            cartan.insert(name.clone(), CartanHomotopy::new(g.clone(), h.clone(), map).map_err(at(p))?);
        }
        let mut sections = BTreeMap::new();
        for (name, s) in &doc.sections {
            let p = format!("/sections/{name}");
            let g = lookup(&dglas, &format!("{p}/dgla"), &s.dgla)?;
            let (parent, _) = lookup(&subdglas, &format!("{p}/sub"), &s.sub)?;
            if parent != &s.dgla {
                return Err(schema(format!("{p}/sub"), format!("{} is a sub-dgla of {parent}", s.sub)));
            }
            let vectors = s
                .span
                .iter()
                .enumerate()
                .map(|(k, v)| vector(&format!("{p}/span/{k}"), g.space(), v))
                .collect::<Result<Vec<_>>>()?;
            sections.insert(name.clone(), Section { dgla: s.dgla.clone(), sub: s.sub.clone(), vectors });
        }
        for (name, e) in &doc.elements {
            let p = format!("/elements/{name}");
            lookup(&dglas, &format!("{p}/dgla"), &e.dgla)?;
            if let Some(a) = &e.artin {
                lookup(&artin, &format!("{p}/artin"), a)?;
            }
        }
        Ok(Self {
            document: doc,
            spaces,
            complexes,
            dglas,
            ends,
            cdgas,
            subdglas,
            filtrations,
            artin,
            morphisms,
            cartan,
            sections,
        })
    }

    pub fn name(&self) -> &str {
        &self.document.name
    }

    pub fn dgla(&self, name: &str) -> Result<&Dgla> {
        lookup(&self.dglas, "/dglas", name)
    }

    pub fn subdgla(&self, name: &str) -> Result<&(String, SubDgla)> {
        lookup(&self.subdglas, "/subdglas", name)
    }

    pub fn cdga(&self, name: &str) -> Result<&CdgaModel> {
        lookup(&self.cdgas, "/cdgas", name)
    }

    pub fn filtration(&self, name: &str) -> Result<&(String, FiltrationData)> {
        lookup(&self.filtrations, "/filtrations", name)
    }

    pub fn artin_algebra(&self, name: &str) -> Result<&ArtinAlgebra> {
        lookup(&self.artin, "/artin", name)
    }

    pub fn morphism(&self, name: &str) -> Result<&DglaMorphism> {
        lookup(&self.morphisms, "/morphisms", name)
    }

    pub fn cartan_homotopy(&self, name: &str) -> Result<&CartanHomotopy> {
        lookup(&self.cartan, "/cartan", name)
    }

    pub fn cartan_doc(&self, name: &str) -> Result<&CartanDoc> {
        lookup(&self.document.cartan, "/cartan", name)
    }

    pub fn section(&self, name: &str) -> Result<&Section> {
        lookup(&self.sections, "/sections", name)
    }

    pub fn element_doc(&self, name: &str) -> Result<&ElementDoc> {
        lookup(&self.document.elements, "/elements", name)
    }

    /// An element's coefficients in the given space (a dgla or its tensor with `m_A`).
    pub fn element_in(&self, name: &str, space: &GradedSpace) -> Result<Vector> {
        let e = self.element_doc(name)?;
        vector(&format!("/elements/{name}/value"), space, &e.value)
    }
}

fn images(path: &str, src: &GradedSpace, tgt: &GradedSpace, docs: &BTreeMap<String, SparseDoc>) -> Result<Vec<Vector>> {
    let mut out = vec![linalg::zeros(tgt.dim()); src.dim()];
    for (label, v) in docs {
        let p = format!("{path}/images/{label}");
        let a = src.find(label).ok_or_else(|| dangling(&p, label))?;
        out[a] = vector(&p, tgt, v)?;
    }
    Ok(out)
}
