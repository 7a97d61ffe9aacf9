//! Acceptance criteria 1–11, exact arithmetic throughout. Prints one PASS/FAIL line per criterion.

use std::io::Write;
use std::process::Command;

use deforma::artin::{tensor_nilpotent, ArtinAlgebra};
use deforma::cartan::{gauge_zero_transport, CartanHomotopy};
use deforma::convolution::HomDgla;
use deforma::dgla::{self, Dgla, DglaMorphism};
use deforma::graded::GradedMap;
use deforma::linalg::{self, Vector};
use deforma::mc;
use deforma::model::Model;
use deforma::period::{contraction_cartan, period_differential};
use deforma::{fixtures, holim, sample, scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load(name: &str) -> Model {
    fixtures::load(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// A1, A2, A3.
fn small_algebras() -> Vec<(String, ArtinAlgebra)> {
    [(1, 2), (1, 3), (2, 2)]
        .into_iter()
        .map(|(k, n)| (format!("({k},{n})"), ArtinAlgebra::truncated_polynomial(k, n).unwrap()))
        .collect()
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for name in fixtures::names() {
        let m = load(name);
        for (g, d) in &m.dglas {
            let r = d.validate();
            ensure(r.is_valid(), || format!("{name}/{g}: {:?}", r.failures.first()))?;
            checked += 1;
        }
    }
    let abelian = load("abelian_line");
    let gl2 = load("gl2");
    let jets = load("jets");
    let pairs = [
        ("(line, line)", abelian.dgla("g").unwrap(), abelian.dgla("g").unwrap()),
        ("(gl2, gl2)", gl2.dgla("gl2").unwrap(), gl2.dgla("gl2").unwrap()),
        ("(jets T, End jets)", jets.dgla("t").unwrap(), jets.dgla("end").unwrap()),
    ];
    let mut dims = Vec::new();
    for (label, g, h) in pairs {
        let hom = HomDgla::new(g, h, 4).map_err(fail)?;
        let r = hom.dgla().validate();
        ensure(r.is_valid(), || format!("Hom{label}: {:?}", r.failures.first()))?;
        dims.push(hom.dim());
    }
    Ok(format!("{checked} fixture dglas, Hom slices of dims {dims:?}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let per_algebra = 36;
    let mut total = 0;
    for name in fixtures::names() {
        let m = load(name);
        let mut count = 0;
        for (_, a) in small_algebras() {
            for k in 0..per_algebra {
                let (gname, g) = m.dglas.iter().nth(k % m.dglas.len()).unwrap();
                let host = tensor_nilpotent(g, &a).map_err(fail)?;
                let h2 = g.complex().cohomology();
                let x = sample::mc_element(&mut rng, &host, &h2).map_err(fail)?;
                let alpha = sample::gauge_parameter(&mut rng, &host);
                let y = mc::gauge_act(host.dgla(), &alpha, &x).map_err(fail)?;
                let r = mc::mc_residue(host.dgla(), &y).map_err(fail)?;
                ensure(linalg::is_zero(&r), || format!("{name}/{gname}: nonzero residue"))?;
                count += 1;
            }
        }
        ensure(count >= 100, || format!("{name}: only {count} samples"))?;
        total += count;
    }
    Ok(format!("{total} samples, all residues zero"))
}

/// The automorphism `e12 ↦ c e12, e21 ↦ e21 / c` of gl2.
fn gl2_scaling(g: &Dgla, c: i64) -> DglaMorphism {
    let s = g.space();
    let images: Vec<Vector> = (0..g.dim())
        .map(|k| {
            let f = match s.label(k) {
                "e12" => scalar::int(c),
                "e21" => scalar::frac(1, c),
                _ => scalar::one(),
            };
            linalg::scale(&f, &s.unit(k))
        })
        .collect();
    let map = GradedMap::from_images(s.clone(), s.clone(), 0, &images).unwrap();
    DglaMorphism::new(g.clone(), g.clone(), map).unwrap()
}

fn residual_is_zero(hom: &HomDgla, pi: &[scalar::Scalar]) -> Result<bool, String> {
    let taylor = hom.extract_taylor(pi).map_err(fail)?;
    Ok(hom.linf_residual(&taylor).iter().all(|c| c.values().all(|v| linalg::is_zero(v))))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let abelian = load("abelian_line");
    let gl2 = load("gl2");
    let line = abelian.dgla("g").unwrap();
    let g = gl2.dgla("gl2").unwrap();
    let line_scalings: Vec<DglaMorphism> = [1, 2, -3]
        .into_iter()
        .map(|c| {
            let map = GradedMap::identity(line.space()).scaled(&scalar::int(c));
            DglaMorphism::new(line.clone(), line.clone(), map).unwrap()
        })
        .collect();
    let gl2_autos = vec![DglaMorphism::identity(g), gl2_scaling(g, 2), gl2_scaling(g, -3)];
    let (mut mc_count, mut non_mc) = (0, 0);
    for (label, src, valid) in [("line", line, line_scalings), ("gl2", g, gl2_autos)] {
        let hom = HomDgla::new(src, src, 3).map_err(fail)?;
        for f in valid.iter().chain([DglaMorphism::zero(src, src)].iter()) {
            let strict = hom.strict_embed(f).map_err(fail)?;
            let pi = hom.assemble(&strict).map_err(fail)?;
            ensure(residual_is_zero(&hom, &pi)?, || format!("{label}: strict embedding has a residual"))?;
            for _ in 0..8 {
                let mut alpha = sample::hom_element(&mut rng, &hom, 0, 3, 0.5);
                alpha = linalg::sub(&alpha, &hom.arity_part(&alpha, 1));
                let moved = mc::gauge_act(hom.dgla(), &alpha, &pi).map_err(fail)?;
                let is_mc = mc::is_mc(hom.dgla(), &moved).map_err(fail)?;
                ensure(is_mc && residual_is_zero(&hom, &moved)?, || format!("{label}: gauge-moved morphism"))?;
                mc_count += 1;
            }
        }
        for _ in 0..30 {
            let pi = sample::hom_element(&mut rng, &hom, 1, 3, 0.4);
            let is_mc = mc::is_mc(hom.dgla(), &pi).map_err(fail)?;
            ensure(is_mc == residual_is_zero(&hom, &pi)?, || format!("{label}: MC and L∞ residual disagree"))?;
            if is_mc {
                mc_count += 1;
            } else {
                non_mc += 1;
            }
        }
    }
    ensure(non_mc > 0, || "no non-MC samples".into())?;

    let scaled = load("gl2_scaled_root");
    let f = scaled.morphism("scale_root").unwrap();
    let hom = HomDgla::new(&f.source, &f.target, 3).map_err(fail)?;
    let residual = hom.linf_residual(&hom.extract_taylor(&hom.strict_element(&f.map).map_err(fail)?).map_err(fail)?);
    let g = &f.source;
    let mut defects = 0;
    for a in 0..g.dim() {
        for b in a + 1..g.dim() {
            let (ea, eb) = (g.space().unit(a), g.space().unit(b));
            let predicted = linalg::sub(&f.apply(&g.bracket(&ea, &eb)), &g.bracket(&f.apply(&ea), &f.apply(&eb)));
            let got = residual[1].get(&vec![a, b]).cloned().unwrap_or_else(|| linalg::zeros(g.dim()));
            ensure(got == predicted, || format!("arity-2 residual on ({a}, {b})"))?;
            defects += usize::from(!linalg::is_zero(&predicted));
        }
    }
    ensure(defects > 0, || "defective map shows no defect".into())?;
    ensure(residual[2].values().all(|v| linalg::is_zero(v)), || "arity-3 residual of a strict map".into())?;
    Ok(format!("{mc_count} MC and {non_mc} non-MC families agree; {defects} predicted arity-2 defects"))
}

/// Cartan homotopy of the named contraction, after checking the contraction identities.
fn contraction(m: &Model) -> Result<CartanHomotopy, String> {
    let doc = m.cartan_doc("i").map_err(fail)?;
    let omega = m.cdga(doc.cdga.as_deref().unwrap()).map_err(fail)?;
    let f = doc.filtration.as_deref().map(|f| &m.filtration(f).unwrap().1);
    let i = m.cartan_homotopy("i").map_err(fail)?;
    let images: Vec<Vector> = (0..i.source.dim()).map(|a| i.i(a)).collect();
    let (cartan, report) = contraction_cartan(omega, &i.source, &images, f).map_err(fail)?;
    ensure(report.all_hold(), || format!("{}: {report:?}", m.name()))?;
    Ok(cartan)
}

fn random_homotopy<R: Rng>(rng: &mut R, g: &Dgla, h: &Dgla) -> CartanHomotopy {
    let images: Vec<Vector> =
        (0..g.dim()).map(|a| sample::homogeneous(rng, h.space(), g.space().degree(a) - 1, 0.7)).collect();
    let map = GradedMap::from_images(g.space().clone(), h.space().clone(), -1, &images).unwrap();
    CartanHomotopy::new(g.clone(), h.clone(), map).unwrap()
}

/// `d_{0,1} i - ½[i, l]` on `sa·sb`, `a < b`, from the brackets of `g` and `h`.
fn arity_two_oracle(hom: &HomDgla, i: &CartanHomotopy, a: usize, b: usize) -> Vector {
    let (g, h) = (&i.source, &i.target);
    let sd = |k: usize| i64::from(g.space().degree(k)) - 1;
    let deg_a = i64::from(g.space().degree(a));
    let ie = i.to_hom(hom).unwrap();
    let le = hom.from_linear(&i.lie_map()).unwrap();
    let (ia, ib) = (hom.eval(&ie, &[a]), hom.eval(&ie, &[b]));
    let (la, lb) = (hom.eval(&le, &[a]), hom.eval(&le, &[b]));
    let i_ab = i.apply(&dgla::dense(g.dim(), g.basis_bracket(a, b)));
    let first = linalg::scale(&-scalar::sign(deg_a), &i_ab);
    let left = linalg::scale(&scalar::sign(sd(a)), &h.bracket(&ia, &lb));
    let right = linalg::scale(&scalar::sign(sd(a) * sd(b) + sd(b)), &h.bracket(&ib, &la));
    linalg::sub(&first, &linalg::scale(&scalar::frac(1, 2), &linalg::add(&left, &right)))
}

fn criterion_4() -> Outcome {
    let mut strict = Vec::new();
    for name in ["jets", "elliptic"] {
        let m = load(name);
        let i = contraction(&m)?;
        let l = i.lie_from_cartan().map_err(fail)?;
        let hom = HomDgla::new(&i.source, &i.target, 4).map_err(fail)?;
        let t = gauge_zero_transport(&hom, &i.to_hom(&hom).map_err(fail)?).map_err(fail)?;
        ensure(t == hom.strict_embed(&l).map_err(fail)?, || format!("{name}: transport differs from l"))?;
        for n in 2..=4 {
            ensure(t.coefficient(n).values().all(|v| linalg::is_zero(v)), || format!("{name}: arity {n} nonzero"))?;
        }
        strict.push(name);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gl2 = load("gl2");
    let interval = load("interval_end");
    let jets = load("jets");
    let pairs = [
        ("(gl2, End interval)", gl2.dgla("gl2").unwrap(), interval.dgla("end").unwrap()),
        ("(jets T, End jets)", jets.dgla("t").unwrap(), jets.dgla("end").unwrap()),
    ];
    let mut samples = Vec::new();
    for (label, g, h) in pairs {
        let hom = HomDgla::new(g, h, 2).map_err(fail)?;
        let mut n = 0;
        let mut nonzero = 0;
        while n < 20 {
            let i = random_homotopy(&mut rng, g, h);
            if i.check().is_cartan() {
                continue;
            }
            let t = gauge_zero_transport(&hom, &i.to_hom(&hom).map_err(fail)?).map_err(fail)?;
            for a in 0..g.dim() {
                for b in a + 1..g.dim() {
                    let predicted = arity_two_oracle(&hom, &i, a, b);
                    let got = t.coefficient(2).get(&vec![a, b]).cloned().unwrap_or_else(|| linalg::zeros(h.dim()));
                    ensure(got == predicted, || format!("{label}: arity-2 component on ({a}, {b})"))?;
                    nonzero += usize::from(!linalg::is_zero(&got));
                }
            }
            n += 1;
        }
        ensure(nonzero > 0, || format!("{label}: all arity-2 components vanish"))?;
        samples.push(format!("{label} x{n}"));
    }
    Ok(format!("strict transport on {strict:?}; arity-2 formula on {}", samples.join(", ")))
}

fn criterion_5() -> Outcome {
    let gl2 = load("gl2");
    let abelian = load("abelian_line");
    let cases = [("(gl2, n2)", &gl2, "n2"), ("(line, 0)", &abelian, "zero"), ("(gl2, gl2)", &gl2, "whole")];
    let mut summary = Vec::new();
    for (label, m, sub) in cases {
        let (parent, n) = m.subdgla(sub).map_err(fail)?;
        let h = m.dgla(parent).map_err(fail)?;
        let runs = holim::holim_stabilization(h, n, &[1, 2, 3]).map_err(fail)?;
        for r in &runs {
            ensure(r.agrees(), || format!("{label} at D = {}: {r:?}", r.tdeg))?;
        }
        ensure(runs.iter().all(|r| r.ranks == runs[0].ranks), || format!("{label}: ranks not stable"))?;
        summary.push(format!("{label} {:?}", runs[0].ranks));
    }
    Ok(summary.join("; "))
}

fn criterion_6() -> Outcome {
    let m = load("gl2");
    let (parent, n) = m.subdgla("n2").map_err(fail)?;
    let section = m.section("lower").map_err(fail)?;
    let r = holim::quasi_abelian_witness(m.dgla(parent).unwrap(), n, &section.vectors, 2).map_err(fail)?;
    ensure(r.cartan && r.l_is_zero && r.chain_map && r.isomorphism, || format!("{r:?}"))?;
    ensure(r.induced_ranks == r.source_ranks && r.source_ranks == r.target_ranks, || format!("{r:?}"))?;
    Ok(format!("isomorphism with ranks {:?}", r.induced_ranks))
}

fn criterion_7() -> Outcome {
    let gl2 = load("gl2");
    let g = gl2.dgla("gl2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dims = Vec::new();
    for (k, n) in [(1, 2), (1, 3)] {
        let a = ArtinAlgebra::truncated_polynomial(k, n).unwrap();
        let group = mc::pi1_at_zero(g, &a).map_err(fail)?;
        ensure(group.dim() == 4 * a.dim(), || format!("group of dim {}", group.dim()))?;
        ensure(group.stabilizer_at_zero.is_empty(), || "nonzero stabilizer".into())?;
        let host = group.host();
        let zero = host.dgla().space().zero_vector();
        ensure(mc::irrelevant_stabilizer(host.dgla(), &zero).map_err(fail)?.is_empty(), || "stabilizer".into())?;
        let x: Vec<Vector> =
            (0..3).map(|_| sample::combination(&mut rng, host.dgla().dim(), &group.lie_basis)).collect();
        let left = group.product(&group.product(&x[0], &x[1]), &x[2]);
        let right = group.product(&x[0], &group.product(&x[1], &x[2]));
        ensure(left == right, || "product not associative".into())?;
        ensure(linalg::is_zero(&group.product(&x[0], &group.inverse(&x[0]))), || "inverse".into())?;
        dims.push(group.dim());
    }
    let interval = load("interval_end");
    let h = interval.dgla("end").unwrap();
    let host = tensor_nilpotent(h, &ArtinAlgebra::truncated_polynomial(1, 2).unwrap()).map_err(fail)?;
    let s = mc::irrelevant_stabilizer(host.dgla(), &host.dgla().space().zero_vector()).map_err(fail)?;
    ensure(!s.is_empty(), || "interval: stabilizer of 0 vanishes".into())?;
    Ok(format!("gl2 groups of dims {dims:?} with trivial stabilizer; interval stabilizer of dim {}", s.len()))
}

fn criterion_8() -> Outcome {
    let m = load("obstructed");
    let g = m.dgla("g").unwrap();
    let a = ArtinAlgebra::truncated_polynomial(1, 3).unwrap();
    let host = tensor_nilpotent(g, &a).map_err(fail)?;
    let x = m.element_in("first_order", host.dgla().space()).map_err(fail)?;
    let h2 = g.complex().cohomology();
    let run = mc::extend_all(&host, &h2, &x).map_err(fail)?;
    let o = run.obstruction.ok_or("no obstruction")?;
    ensure(o.order == 2 && !o.is_zero(), || format!("{o:?}"))?;
    let s = host.dgla().space();
    let mut expected = s.zero_vector();
    expected[s.find("y|eps^2").ok_or("no y|eps^2")?] = scalar::frac(1, 2);
    ensure(o.cocycle(&host, &h2) == expected, || "class is not y/2 at eps^2".into())?;

    let e = load("elliptic");
    let g = e.dgla("g").unwrap();
    let a4 = e.artin_algebra("A4").map_err(fail)?;
    ensure(a4.order() == 5 && a4.generators() == 1, || "A4 is not K[eps]/(eps^5)".into())?;
    let host = tensor_nilpotent(g, a4).map_err(fail)?;
    let h2 = g.complex().cohomology();
    let mut x = e.element_in("first_order", host.dgla().space()).map_err(fail)?;
    for j in 2..=4 {
        match mc::mc_extend_order(&host, &h2, &x, j).map_err(fail)? {
            mc::Extension::Lifted(y) => x = y,
            mc::Extension::Obstructed(o) => return Err(format!("elliptic obstructed at order {}", o.order)),
        }
    }
    ensure(mc::is_mc(host.dgla(), &x).map_err(fail)?, || "elliptic lift is not MC".into())?;
    Ok("obstructed: y/2 at order 2; elliptic: lifted through order 4".into())
}

fn criterion_9() -> Outcome {
    let m = load("elliptic");
    let i = contraction(&m)?;
    let omega = m.cdga("omega").unwrap();
    let f = &m.filtration("hodge").unwrap().1;
    let d = period_differential(omega, &i, f).map_err(fail)?;
    ensure(d.h1_dim == 1 && d.end_dim == 1 && d.rank == 1 && d.in_end && d.isomorphism, || format!("{d:?}"))?;
    let family = vec![vec![(1, "1*xi -> 1*xib".to_string())]];
    ensure(d.families == family, || format!("image family {:?}", d.families))?;
    Ok(format!("1x1 isomorphism, matrix {:?}, family {:?}", d.matrix, d.families[0]))
}

fn criterion_10() -> Outcome {
    let m = load("jets");
    let i = contraction(&m)?;
    let rep = i.check();
    ensure(rep.is_cartan(), || format!("{:?}", rep.report.failures.first()))?;
    let t = m.dgla("t").unwrap();
    Ok(format!("defining equation for l, conditions A and B, l of brackets, [d, l] on {} generators", t.dim()))
}

fn cli_run() -> Result<Vec<u8>, String> {
    let runs: &[(&[&str], i32)] = &[
        (&["validate", "--model", "abelian_line"], 0),
        (&["validate", "--model", "gl2"], 0),
        (&["validate", "--model", "interval_end"], 0),
        (&["validate", "--model", "torus"], 0),
        (&["validate", "--model", "jets"], 0),
        (&["validate", "--model", "elliptic"], 0),
        (&["validate", "--model", "obstructed"], 0),
        (&["validate", "--model", "gl2_corrupted"], 1),
        (&["cohomology", "--model", "torus"], 0),
        (&["gauge", "--model", "gl2", "--pi1", "--artin", "1,3"], 0),
        (&["gauge", "--model", "interval_end", "--stabilizer", "--artin", "1,2"], 0),
        (&["linf-check", "--model", "gl2", "--morphism", "identity"], 0),
        (&["linf-check", "--model", "gl2_scaled_root"], 1),
        (&["transport", "i", "--model", "jets", "--arity", "4"], 0),
        (&["transport", "i", "--model", "elliptic", "--arity", "4"], 0),
        (&["holim", "--model", "gl2", "--sub", "n2", "--cohomology", "--tdeg", "3"], 0),
        (&["holim", "--model", "abelian_line", "--sub", "zero", "--cohomology", "--tdeg", "3"], 0),
        (&["holim", "--model", "gl2", "--sub", "whole", "--cohomology", "--tdeg", "3"], 0),
        (&["holim", "--model", "gl2", "--sub", "n2", "--witness", "--tdeg", "2"], 0),
        (&["holim", "--model", "jets", "--filtration", "hodge", "--map"], 0),
        (&["mc", "--model", "obstructed", "--artin", "1,3", "--extend", "--element", "first_order"], 0),
        (&["mc", "--model", "elliptic", "--extend", "--element", "first_order"], 0),
        (&["period", "--model", "elliptic", "--differential"], 0),
        (&["cartan-check", "i", "--model", "jets"], 0),
        (&["validate", "--model", "missing_fixture"], 2),
    ];
    let mut out = Vec::new();
    for (args, code) in runs {
        let o = Command::new(env!("CARGO_BIN_EXE_deforma")).args(*args).output().map_err(fail)?;
        let got = o.status.code().unwrap_or(-1);
        ensure(got == *code, || format!("{args:?}: exit {got}, expected {code}"))?;
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| format!("{args:?}: {e}"))?;
        let status = if *code == 0 { "ok" } else { "invalid" };
        ensure(v["status"] == status, || format!("{args:?}: status {}", v["status"]))?;
        out.extend_from_slice(&o.stdout);
    }
    Ok(out)
}

fn criterion_11() -> Outcome {
    let first = cli_run()?;
    let second = cli_run()?;
    ensure(first == second, || "outputs differ between runs".into())?;
    Ok(format!("{} bytes identical across two runs", first.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("axiom suite", criterion_1),
        ("gauge-action soundness", criterion_2),
        ("MC and L-infinity residual agree", criterion_3),
        ("transport of zero along a Cartan homotopy", criterion_4),
        ("holim cohomology", criterion_5),
        ("quasi-abelian witness", criterion_6),
        ("pi1 at zero and irrelevant stabilizers", criterion_7),
        ("obstructions", criterion_8),
        ("period differential", criterion_9),
        ("Cartan identities", criterion_10),
        ("CLI determinism", criterion_11),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout).unwrap();
    for (k, (title, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        let line = match f() {
            Ok(detail) => format!("criterion {n:>2} PASS  {title}: {detail}"),
            Err(why) => {
                failed.push(n);
                format!("criterion {n:>2} FAIL  {title}: {why}")
            }
        };
        writeln!(stdout, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
