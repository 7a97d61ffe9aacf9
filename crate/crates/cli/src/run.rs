//! Command dispatch over a resolved model.

use std::collections::BTreeMap;

use deforma::artin::{tensor_nilpotent, ArtinAlgebra, NilpotentDgla};
use deforma::cartan::{gauge_zero_transport, transport_of_l, CartanHomotopy};
use deforma::complex::Complex;
use deforma::convolution::HomDgla;
use deforma::dgla::{Dgla, SubDgla};
use deforma::graded::GradedSpace;
use deforma::holim::{self, BoundedHolim};
use deforma::linalg::{self, Vector};
use deforma::mc::{self, GaugeDecision};
use deforma::model::Model;
use deforma::period::{self, CdgaModel, FiltrationData};
use deforma::report::ValidationReport;
use deforma::scalar;
use serde_json::{json, Map, Value};

use crate::emit::Status;
use crate::{Command, Failure, GaugeArgs, HolimArgs, McArgs, Options, PeriodArgs};

pub struct Outcome {
    pub status: Status,
    pub payload: Value,
}

type Run = Result<Outcome, Failure>;

const DEFAULT_ARITY: usize = 3;
const DEFAULT_TDEG: usize = 1;

pub fn run(model: &Model, command: &Command, opts: &Options) -> Run {
    match command {
        Command::Validate { dgla } => validate(model, dgla.as_deref()),
        Command::Cohomology { dgla, complex } => cohomology(model, dgla.as_deref(), complex.as_deref()),
        Command::Mc(a) => mc_command(model, a, opts),
        Command::Gauge(a) => gauge(model, a, opts),
        Command::LinfCheck { morphism } => linf_check(model, morphism.as_deref(), opts),
        Command::CartanCheck { name } => cartan_check(model, name.as_deref()),
        Command::Transport { name } => transport(model, name.as_deref(), opts),
        Command::Holim(a) => holim_command(model, a, opts),
        Command::Period(a) => period_command(model, a, opts),
    }
}

/// The named entry, or the only one when no name is given.
fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, kind: &str) -> Result<(&'a str, &'a T), Failure> {
    match name {
        Some(n) => map
            .get_key_value(n)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| Failure::Input(format!("no {kind} named {n:?}"))),
        None if map.len() == 1 => Ok(map.iter().next().map(|(k, v)| (k.as_str(), v)).expect("one entry")),
        None if map.is_empty() => Err(Failure::Input(format!("the model declares no {kind}"))),
        None => Err(Failure::Input(format!("several {kind}s; pass --{kind}"))),
    }
}

fn vector(space: &GradedSpace, v: &[scalar::Scalar]) -> Value {
    Value::Object(space.describe(v).into_iter().map(|(l, q)| (l, Value::String(scalar::format(&q)))).collect())
}

fn vectors(space: &GradedSpace, vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(|v| vector(space, v)).collect())
}

fn ranks(r: &BTreeMap<i32, usize>) -> Value {
    Value::Object(r.iter().map(|(d, n)| (d.to_string(), json!(n))).collect())
}

fn report_json(r: &ValidationReport) -> Value {
    json!({ "valid": r.is_valid(), "failures": r.failures })
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn validate(model: &Model, only: Option<&str>) -> Run {
    let mut out = Map::new();
    let mut ok = true;
    let mut section = |key: &str, items: Vec<(String, ValidationReport)>| {
        let m: Map<String, Value> = items
            .into_iter()
            .map(|(n, r)| {
                ok &= r.is_valid();
                (n, report_json(&r))
            })
            .collect();
        if !m.is_empty() {
            out.insert(key.into(), Value::Object(m));
        }
    };
    if let Some(name) = only {
        let (n, g) = pick(&model.dglas, Some(name), "dgla")?;
        section("dglas", vec![(n.to_string(), g.validate())]);
    } else {
        section("dglas", model.dglas.iter().map(|(n, g)| (n.clone(), g.validate())).collect());
        section("cdgas", model.cdgas.iter().map(|(n, c)| (n.clone(), c.validate())).collect());
        section("artin", model.artin.iter().map(|(n, a)| (n.clone(), a.validate())).collect());
        section("subdglas", model.subdglas.iter().map(|(n, (_, s))| (n.clone(), s.closure_report())).collect());
        section("morphisms", model.morphisms.iter().map(|(n, m)| (n.clone(), m.validate())).collect());
        let filtrations = model
            .filtrations
            .iter()
            .map(|(n, (on, f))| {
                let r = match model.cdgas.get(on) {
                    Some(c) => f.validate(c.space(), Some(c.complex())),
                    None => f.validate(&model.spaces[on], None),
                };
                (n.clone(), r)
            })
            .collect();
        section("filtrations", filtrations);
    }
    Ok(Outcome { status: Status::check(ok), payload: Value::Object(out) })
}

fn cohomology_json(c: &Complex) -> Value {
    let h = c.cohomology();
    let reps: Map<String, Value> = h
        .ranks()
        .keys()
        .map(|d| (d.to_string(), vectors(c.space(), &h.representatives(*d))))
        .filter(|(_, v)| v.as_array().is_some_and(|a| !a.is_empty()))
        .collect();
    json!({
        "ranks": ranks(&h.ranks().into_iter().filter(|(_, r)| *r > 0).collect()),
        "representatives": reps,
        "euler_characteristic": h.euler_characteristic(),
    })
}

fn cohomology(model: &Model, dgla: Option<&str>, complex: Option<&str>) -> Run {
    let mut out = Map::new();
    if let Some(n) = complex {
        let (n, c) = pick(&model.complexes, Some(n), "complex")?;
        out.insert(n.into(), cohomology_json(c));
    } else if dgla.is_some() || model.complexes.is_empty() {
        let (n, g) = pick(&model.dglas, dgla, "dgla")?;
        out.insert(n.into(), cohomology_json(g.complex()));
    } else {
        for (n, c) in &model.complexes {
            out.insert(n.clone(), cohomology_json(c));
        }
    }
    Ok(Outcome { status: Status::Ok, payload: Value::Object(out) })
}

fn artin(model: &Model, opts: &Options, element: Option<&str>) -> Result<ArtinAlgebra, Failure> {
    if let Some((k, n)) = opts.artin {
        return Ok(ArtinAlgebra::truncated_polynomial(k, n)?);
    }
    let declared = element.map(|e| model.element_doc(e)).transpose()?.and_then(|d| d.artin.clone());
    match declared {
        Some(a) => Ok(model.artin_algebra(&a)?.clone()),
        None => Err(Failure::Input("pass --artin k,N".into())),
    }
}

/// `g ⊗ m_A` and the named element in it (zero when absent).
struct Host {
    name: String,
    host: NilpotentDgla,
    x: Vector,
}

fn host(model: &Model, dgla: Option<&str>, element: Option<&str>, opts: &Options) -> Result<Host, Failure> {
    let dgla = match (dgla, element) {
        (None, Some(e)) => Some(model.element_doc(e)?.dgla.as_str()),
        (d, _) => d,
    };
    let (name, g) = pick(&model.dglas, dgla, "dgla")?;
    let a = artin(model, opts, element)?;
    let host = tensor_nilpotent(g, &a)?;
    let x = named(model, &host, element)?;
    Ok(Host { name: name.to_string(), host, x })
}

fn named(model: &Model, host: &NilpotentDgla, element: Option<&str>) -> Result<Vector, Failure> {
    let space = host.dgla().space();
    Ok(match element {
        Some(e) => model.element_in(e, space)?,
        None => space.zero_vector(),
    })
}

fn obstruction_json(host: &NilpotentDgla, o: &mc::ObstructionClass) -> Value {
    json!({
        "order": o.order,
        "classes": o.components(host),
        "residual": vector(host.dgla().space(), &o.residual),
        "is_zero": o.is_zero(),
    })
}

fn mc_command(model: &Model, a: &McArgs, opts: &Options) -> Run {
    let Host { name, host, x } = host(model, a.dgla.as_deref(), a.element.as_deref(), opts)?;
    let g = host.dgla();
    if a.extend || a.obstruction {
        let h2 = host.base().complex().cohomology();
        let run = mc::extend_all(&host, &h2, &x)?;
        let obstruction = run.obstruction.as_ref().map(|o| obstruction_json(&host, o)).unwrap_or(Value::Null);
        let payload = if a.obstruction {
            json!({ "dgla": name, "obstruction": obstruction })
        } else {
            json!({
                "dgla": name,
                "lifted": run.lifted,
                "solution": vector(g.space(), &run.solution),
                "obstruction": obstruction,
                "is_mc": mc::is_mc(g, &run.solution)?,
            })
        };
        return Ok(Outcome { status: Status::Ok, payload });
    }
    let r = mc::mc_residue(g, &x)?;
    let ok = linalg::is_zero(&r);
    Ok(Outcome {
        status: Status::check(ok),
        payload: json!({ "dgla": name, "residue": vector(g.space(), &r), "is_mc": ok }),
    })
}

fn gauge(model: &Model, a: &GaugeArgs, opts: &Options) -> Run {
    if a.pi1 {
        let (name, h) = pick(&model.dglas, a.dgla.as_deref(), "dgla")?;
        let alg = artin(model, opts, None)?;
        let group = mc::pi1_at_zero(h, &alg)?;
        let payload = json!({
            "dgla": name,
            "dim": group.dim(),
            "abelian": group.is_abelian(),
            "bch_length": group.bch_length,
            "stabilizer_at_zero": group.stabilizer_at_zero.len(),
        });
        return Ok(Outcome { status: Status::check(group.stabilizer_at_zero.is_empty()), payload });
    }
    let element = a.element.as_deref().or(a.alpha.as_deref()).or(a.target.as_deref());
    let Host { name, host, .. } = host(model, a.dgla.as_deref(), element, opts)?;
    let x = named(model, &host, a.element.as_deref())?;
    let g = host.dgla();
    let space = g.space();
    let alpha = || -> Result<Vector, Failure> {
        let n = a.alpha.as_deref().ok_or_else(|| Failure::Input("pass --alpha".into()))?;
        named(model, &host, Some(n))
    };
    if a.equiv {
        let t = a.target.as_deref().ok_or_else(|| Failure::Input("pass --target".into()))?;
        let y = named(model, &host, Some(t))?;
        let (status, decision) = match mc::gauge_equivalent(&host, &x, &y)? {
            GaugeDecision::Equivalent { witness } => {
                (Status::Ok, json!({ "decision": "equivalent", "witness": vector(space, &witness) }))
            }
            GaugeDecision::NotEquivalent { order, discrepancy, reason } => (
                Status::Invalid,
                json!({
                    "decision": "not-equivalent",
                    "order": order,
                    "discrepancy": vector(space, &discrepancy),
                    "reason": reason,
                }),
            ),
            GaugeDecision::Inconclusive { order, reason } => {
                (Status::Inconclusive, json!({ "decision": "inconclusive", "order": order, "reason": reason }))
            }
        };
        return Ok(Outcome { status, payload: json!({ "dgla": name, "result": decision }) });
    }
    if a.stabilizer {
        let s = mc::irrelevant_stabilizer(g, &x)?;
        return Ok(Outcome {
            status: Status::Ok,
            payload: json!({ "dgla": name, "dim": linalg::span_rank(g.dim(), &s), "generators": vectors(space, &s) }),
        });
    }
    if a.path {
        let al = alpha()?;
        let path = mc::gauge_path(g, &al, &x)?;
        let end = mc::gauge_act(g, &al, &x)?;
        let is_mc = path.is_mc(g)?;
        let ends = path.at_zero() == x && path.at_one() == end;
        return Ok(Outcome {
            status: Status::check(is_mc && ends),
            payload: json!({ "dgla": name, "is_mc": is_mc, "endpoints": ends, "end": vector(space, &end) }),
        });
    }
    let al = alpha()?;
    let y = mc::gauge_act(g, &al, &x)?;
    let r = mc::mc_residue(g, &y)?;
    let ok = linalg::is_zero(&r);
    Ok(Outcome {
        status: Status::check(ok),
        payload: json!({ "dgla": name, "result": vector(space, &y), "residue": vector(space, &r), "is_mc": ok }),
    })
}

fn monomial_label(g: &Dgla, m: &[usize]) -> String {
    m.iter().map(|&a| g.space().label(a)).collect::<Vec<_>>().join("*")
}

/// Nonzero components per arity, keyed by monomial.
fn taylor_json(g: &Dgla, h: &Dgla, components: &[BTreeMap<Vec<usize>, Vector>]) -> Value {
    let arities: Map<String, Value> = components
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m: Map<String, Value> = c
                .iter()
                .filter(|(_, v)| !linalg::is_zero(v))
                .map(|(m, v)| (monomial_label(g, m), vector(h.space(), v)))
                .collect();
            ((k + 1).to_string(), Value::Object(m))
        })
        .filter(|(_, v)| v.as_object().is_some_and(|m| !m.is_empty()))
        .collect();
    Value::Object(arities)
}

fn linf_check(model: &Model, morphism: Option<&str>, opts: &Options) -> Run {
    let (name, f) = pick(&model.morphisms, morphism, "morphism")?;
    let arity = opts.arity.unwrap_or(DEFAULT_ARITY);
    let hom = HomDgla::new(&f.source, &f.target, arity)?;
    let pi = hom.strict_element(&f.map)?;
    let residual = hom.linf_residual(&hom.extract_taylor(&pi)?);
    let zero = residual.iter().all(|c| c.values().all(|v| linalg::is_zero(v)));
    let is_mc = mc::is_mc(hom.dgla(), &pi)?;
    Ok(Outcome {
        status: Status::check(zero && is_mc),
        payload: json!({
            "morphism": name,
            "arity": arity,
            "residual": taylor_json(&f.source, &f.target, &residual),
            "residual_is_zero": zero,
            "assembled_is_mc": is_mc,
        }),
    })
}

fn cartan_check(model: &Model, name: Option<&str>) -> Run {
    let (name, i) = pick(&model.cartan, name, "cartan")?;
    let report = i.check();
    let mut ok = report.is_cartan();
    let mut payload = json!({
        "cartan": name,
        "is_cartan": report.is_cartan(),
        "failures": report.report.failures,
        "strong_bracket": report.strong_bracket,
        "strong_commuting": report.strong_commuting,
    });
    let doc = model.cartan_doc(name)?;
    if let Some(c) = &doc.cdga {
        let omega = model.cdga(c)?;
        let f = doc.filtration.as_deref().map(|f| model.filtration(f)).transpose()?.map(|(_, f)| f);
        let images: Vec<Vector> = (0..i.source.dim()).map(|a| i.i(a)).collect();
        let (_, contraction) = period::contraction_cartan(omega, &i.source, &images, f)?;
        ok &= contraction.all_hold();
        payload["contraction"] = json!({
            "defining_equation": contraction.defining_equation,
            "lie_bracket": contraction.lie_bracket,
            "lie_chain": contraction.lie_chain,
            "preserves_filtration": contraction.preserves_filtration,
        });
    }
    Ok(Outcome { status: Status::check(ok), payload })
}

fn transport(model: &Model, name: Option<&str>, opts: &Options) -> Run {
    let (name, i) = pick(&model.cartan, name, "cartan")?;
    let arity = opts.arity.unwrap_or(DEFAULT_ARITY);
    let hom = HomDgla::new(&i.source, &i.target, arity)?;
    let ie = i.to_hom(&hom)?;
    let t = gauge_zero_transport(&hom, &ie)?;
    let l = i.lie_from_cartan()?;
    let strict = hom.strict_embed(&l)?;
    let equals = t == strict;
    let back = transport_of_l(&hom, &ie, &l.map)?;
    let back_zero = linalg::is_zero(&back);
    Ok(Outcome {
        status: Status::check(equals && back_zero),
        payload: json!({
            "cartan": name,
            "arity": arity,
            "transport": taylor_json(&i.source, &i.target, &t.taylor),
            "strict": t.is_strict(),
            "equals_strict_l": equals,
            "l_transports_to_zero": back_zero,
        }),
    })
}

/// The ambient dgla and sub-dgla named by `--dgla` with `--sub`, or by `--filtration`.
fn pair(
    model: &Model,
    dgla: Option<&str>,
    sub: Option<&str>,
    filtration: Option<&str>,
) -> Result<(Dgla, SubDgla), Failure> {
    if let Some(f) = filtration {
        let (on, data) = model.filtration(f)?;
        let omega = model.cdga(on).map_err(|_| Failure::Input(format!("filtration {f:?} is not on a cdga")))?;
        let end = period::build_end_dgla(omega)?;
        let n = period::filtered_subdgla(&end, data)?;
        return Ok((end.dgla().clone(), n));
    }
    let (_, (parent, n)) = pick(&model.subdglas, sub, "sub")?;
    if let Some(d) = dgla.filter(|d| *d != parent) {
        return Err(Failure::Input(format!("sub-dgla lives in {parent:?}, not {d:?}")));
    }
    Ok((model.dgla(parent)?.clone(), n.clone()))
}

fn holim_command(model: &Model, a: &HolimArgs, opts: &Options) -> Run {
    let (h, n) = pair(model, a.dgla.as_deref(), a.sub.as_deref(), a.filtration.as_deref())?;
    let tdeg = opts.tdeg.unwrap_or(DEFAULT_TDEG);
    if a.witness {
        let s = pick(&model.sections, a.section.as_deref(), "section")?.1;
        let r = holim::quasi_abelian_witness(&h, &n, &s.vectors, tdeg)?;
        let ok = r.cartan && r.l_is_zero && r.chain_map && r.isomorphism;
        return Ok(Outcome { status: Status::check(ok), payload: json!({ "tdeg": tdeg, "witness": to_value(&r) }) });
    }
    if a.map {
        let i: &CartanHomotopy = pick(&model.cartan, a.cartan.as_deref(), "cartan")?.1;
        let r = holim::map_into_holim(i, &n, opts.arity.unwrap_or(DEFAULT_ARITY))?;
        let ok = r.chain_map && r.composite_is_minus_i && r.flow_ends_at_zero && r.flow_is_mc;
        return Ok(Outcome { status: Status::check(ok), payload: to_value(&r) });
    }
    if a.validate {
        return holim_validate(&h, &n, tdeg);
    }
    let bounds: Vec<usize> = (1..=tdeg).collect();
    let all = holim::holim_stabilization(&h, &n, &bounds)?;
    let last = all.last().ok_or_else(|| Failure::Input("--tdeg must be at least 1".into()))?;
    let stable = all.iter().all(|c| c.ranks == last.ranks);
    let ok = all.iter().all(|c| c.agrees()) && stable;
    Ok(Outcome {
        status: Status::check(ok),
        payload: json!({
            "tdeg": tdeg,
            "ranks": ranks(&last.ranks),
            "expected": ranks(&last.expected),
            "projection_ranks": ranks(&last.projection_ranks),
            "stable": stable,
        }),
    })
}

/// Differentials and pairwise brackets of a basis of the bounded holim stay inside the holim.
fn holim_validate(h: &Dgla, n: &SubDgla, tdeg: usize) -> Run {
    let b = BoundedHolim::new(h, n, tdeg)?;
    let dim = b.complex().dim();
    let basis: Vec<_> = (0..dim).map(|k| b.element(&linalg::unit(dim, k))).collect();
    let mut report = ValidationReport::ok();
    for e in &basis {
        report.extend(holim::holim_validate(h, n, e));
        report.extend(holim::holim_validate(h, n, &e.d(h)));
    }
    for (k, e) in basis.iter().enumerate() {
        for f in &basis[k..] {
            report.extend(holim::holim_validate(h, n, &e.bracket(h, f)?));
        }
    }
    Ok(Outcome {
        status: Status::check(report.is_valid()),
        payload: json!({ "tdeg": tdeg, "dim": dim, "report": report_json(&report) }),
    })
}

struct PeriodInputs<'a> {
    name: &'a str,
    cartan: &'a CartanHomotopy,
    omega: &'a CdgaModel,
    filtration: &'a FiltrationData,
}

fn period_inputs<'a>(model: &'a Model, a: &'a PeriodArgs) -> Result<PeriodInputs<'a>, Failure> {
    let (name, cartan) = pick(&model.cartan, a.cartan.as_deref(), "cartan")?;
    let doc = model.cartan_doc(name)?;
    let c = doc.cdga.as_deref().ok_or_else(|| Failure::Input(format!("cartan {name:?} names no cdga")))?;
    let f = a
        .filtration
        .as_deref()
        .or(doc.filtration.as_deref())
        .ok_or_else(|| Failure::Input("pass --filtration".into()))?;
    Ok(PeriodInputs { name, cartan, omega: model.cdga(c)?, filtration: &model.filtration(f)?.1 })
}

fn period_command(model: &Model, a: &PeriodArgs, opts: &Options) -> Run {
    let p = period_inputs(model, a)?;
    if a.obstruction_image {
        let g = &p.cartan.source;
        let alg = artin(model, opts, a.element.as_deref())?;
        let host = tensor_nilpotent(g, &alg)?;
        let x = named(model, &host, a.element.as_deref())?;
        let h2 = g.complex().cohomology();
        let run = mc::extend_all(&host, &h2, &x)?;
        let image = match &run.obstruction {
            Some(o) => {
                let end = period::build_end_dgla(p.omega)?;
                let n = period::filtered_subdgla(&end, p.filtration)?;
                to_value(&period::obstruction_image(p.cartan, &n, &host, &h2, o)?)
            }
            None => Value::Null,
        };
        return Ok(Outcome {
            status: Status::Ok,
            payload: json!({ "cartan": p.name, "lifted": run.lifted, "image": image }),
        });
    }
    let d = period::period_differential(p.omega, p.cartan, p.filtration)?;
    Ok(Outcome { status: Status::check(d.in_end), payload: json!({ "cartan": p.name, "differential": to_value(&d) }) })
}
