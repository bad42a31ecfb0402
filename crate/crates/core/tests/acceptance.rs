//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use orbitrsh::dynsys::{fixed, ArcSet, Point, Region, System};
use orbitrsh::par::Exec;
use orbitrsh::pipeline::{self, Check, Command, RunOptions, Setup};
use orbitrsh::rep::corpus;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const EPS: f64 = 1e-9;

fn golden_cf() -> String {
    let terms: Vec<String> = std::iter::once("0".to_string()).chain(std::iter::repeat_n("1".to_string(), 100)).collect();
    terms.join(",")
}

fn golden_config(bundle: &str, samples: usize) -> String {
    format!(
        r#"{{"schema_version":1,"system":{{"kind":"rotation","theta_cf":[{}]}},"bundle":{bundle},
            "Y":{{"arcs":[{{"a":"0","b":"0.5"}}]}},"budgets":{{"samples":{samples},"seed":11}}}}"#,
        golden_cf()
    )
}

fn odometer_config(samples: usize) -> String {
    format!(
        r#"{{"schema_version":1,"system":{{"kind":"odometer","radices":[2,3]}},"bundle":{{"trivial":true}},
            "Y":{{"prefixes":[[0]]}},"budgets":{{"samples":{samples},"seed":11}}}}"#
    )
}

fn load(text: &str) -> Result<Setup, String> {
    let cfg = pipeline::parse_config(text).map_err(|e| e.to_string())?;
    pipeline::setup(&cfg).map_err(|e| e.to_string())
}

fn theta() -> u128 {
    let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
    fixed::from_continued_fraction(&cf).unwrap()
}

fn same(sys: &System, a: &Region, b: &Region) -> bool {
    sys.is_empty(&sys.difference(a, b)) && sys.is_empty(&sys.difference(b, a))
}

fn units(q: &BigRational) -> BigRational {
    q * BigRational::from_integer(BigInt::from(1u8) << 128)
}

fn all_pass(checks: &[Check]) -> Outcome {
    let line = checks.iter().map(|c| format!("{}={:.2e}", c.name, c.value)).collect::<Vec<_>>().join(" ");
    if checks.iter().all(|c| c.passed) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn tower_covering() -> Outcome {
    let s = load(&golden_config(r#"{"degree":1}"#, 50))?;
    let (sys, t) = (s.model.sys(), &s.model.towers);
    ensure(t.heights() == vec![1, 2, 3], format!("heights {:?}", t.heights()))?;
    let th = theta();
    let half = 1u128 << 127;
    let one_minus = th.wrapping_neg();
    let glue = half.wrapping_sub(th.wrapping_mul(2));
    let expected = [
        (ArcSet::arc(one_minus, half, true, true), one_minus.abs_diff(half)),
        (ArcSet::arc(0, glue, true, true), glue),
        (ArcSet::arc(glue, one_minus, false, false), one_minus - glue),
    ];
    let mut total = BigRational::from_integer(0.into());
    for (k, (arc, len)) in expected.into_iter().enumerate() {
        let level = t.level(k + 1).map_err(|e| e.to_string())?;
        ensure(same(sys, &level.base, &Region::Arcs(arc)), format!("Y_{} differs from the oracle", k + 1))?;
        let m = sys.measure(&level.base);
        ensure(units(&m) == BigRational::from_integer(len.into()), format!("measure of Y_{}", k + 1))?;
        total += m * BigRational::from_integer(level.r.into());
    }
    let residual = (total - BigRational::from_integer(1.into())).abs();
    let limit = BigRational::new(1.into(), BigInt::from(1u8) << 60);
    ensure(residual < limit && residual == t.covering_residual, "covering residual")?;
    Ok(format!("K=3 r=(1,2,3) residual={residual}"))
}

fn cantor_case() -> Outcome {
    let s = load(&odometer_config(50))?;
    let (sys, t) = (s.model.sys(), &s.model.towers);
    ensure(t.K() == 1 && t.heights() == vec![2], format!("heights {:?}", t.heights()))?;
    let glue = t.glue_boundary(sys, 1).map_err(|e| e.to_string())?;
    ensure(sys.is_empty(&glue), "glue boundary not empty")?;
    ensure(t.covering_residual == BigRational::from_integer(0.into()), "nonzero residual")?;
    ensure(same(sys, &t.level(1).unwrap().base, &s.model.y), "Y_1 != Y")?;
    Ok("K=1 r_1=2 glue=∅ residual=0".into())
}

fn brute_force_returns() -> Outcome {
    let mut lines = Vec::new();
    for text in [golden_config(r#"{"degree":1}"#, 200), odometer_config(200)] {
        let s = load(&text)?;
        let (sys, y, t) = (s.model.sys(), &s.model.y, &s.model.towers);
        let pts = sys.sample(y, 200, 5).map_err(|e| e.to_string())?;
        ensure(pts.len() == 200, "sample count")?;
        for p in &pts {
            let mut q = p.clone();
            let mut n = 0u32;
            loop {
                q = sys.apply(&q, 1).map_err(|e| e.to_string())?;
                n += 1;
                if sys.contains(y, &q) || n > 100 {
                    break;
                }
            }
            let k = t.tower_of(sys, p).map_err(|e| e.to_string())?.ok_or("sample outside every Y_k")?;
            ensure(n == t.r(k).unwrap(), format!("return time {n} != r_{k}"))?;
        }
        lines.push(format!("{} points exact", pts.len()));
    }
    Ok(lines.join(", "))
}

fn cocycle_and_charts() -> Outcome {
    let s = load(&golden_config(r#"{"degree":1}"#, 300))?;
    let checks = pipeline::bundle_suite(&s.model, 300, 3, Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(checks[1].samples >= 500, format!("only {} overlap samples", checks[1].samples))?;
    all_pass(&checks)
}

fn covariance() -> Outcome {
    let mut out = Vec::new();
    for bundle in [r#"{"trivial":true}"#, r#"{"degree":1}"#] {
        let s = load(&golden_config(bundle, 1000))?;
        ensure(corpus::generator_pairs(&s.model).len() >= 6, "fewer than 6 generator pairs")?;
        out.push(all_pass(&pipeline::covariance_suite(&s.model, 1000, 4, Exec::Parallel).map_err(|e| e.to_string())?)?);
    }
    Ok(out.join(" | "))
}

fn gauge() -> Outcome {
    let s = load(&golden_config(r#"{"degree":1}"#, 100))?;
    let checks = pipeline::gauge_suite(&s.model, 100, 5, Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(checks[1].samples > 0, "no words of degree >= r_k were tested")?;
    all_pass(&checks)
}

fn psi() -> Outcome {
    let s = load(&golden_config(r#"{"degree":1}"#, 1000))?;
    all_pass(&pipeline::psi_suite(&s.model, 1000, 6, Exec::Parallel).map_err(|e| e.to_string())?)
}

fn bdp() -> Outcome {
    let s = load(&golden_config(r#"{"degree":1}"#, 50))?;
    let m = &s.model;
    let x = Point::Circle(theta().wrapping_neg());
    let glue = m.towers.glue_points(m.sys(), 3, 4, 0).map_err(|e| e.to_string())?;
    ensure(glue.contains(&x), "1-θ is not a glue point of Y_3")?;
    for w in corpus::random_words(m, 50, 8) {
        let r = m.boundary_decomposition_check(&w, 3, &x).map_err(|e| e.to_string())?;
        ensure(r.itinerary.mu == vec![1, 2], format!("itinerary {:?}", r.itinerary.mu))?;
        ensure(r.block_residual < EPS && r.offblock < EPS, format!("at 1-θ: {r:?}"))?;
    }
    all_pass(&pipeline::bdp_suite(m, 50, 8, Exec::Parallel).map_err(|e| e.to_string())?)
}

fn lift() -> Outcome {
    let s = load(&golden_config(r#"{"degree":1}"#, 100))?;
    all_pass(&pipeline::lift_suite(&s.model, 100, 9, Exec::Parallel).map_err(|e| e.to_string())?)
}

fn rsh_assembly() -> Outcome {
    let mut shapes = Vec::new();
    for bundle in [r#"{"degree":1}"#, r#"{"trivial":true}"#] {
        let cfg = pipeline::parse_config(&golden_config(bundle, 100)).map_err(|e| e.to_string())?;
        let report = pipeline::run(Command::Decompose, &cfg, RunOptions { jobs: Some(2), ..Default::default() });
        ensure(report.exit_code == 0, format!("exit {}", report.exit_code))?;
        let rsh = report.rsh.ok_or("no rsh section")?;
        ensure(rsh.matrix_sizes == vec![1, 2, 3], format!("sizes {:?}", rsh.matrix_sizes))?;
        ensure(rsh.max_pullback_residual < EPS, format!("pullback {:.2e}", rsh.max_pullback_residual))?;
        let closures: Vec<_> = report.towers.ok_or("no towers")?.levels.into_iter().map(|l| l.base_closure).collect();
        ensure(rsh.base_spaces == closures, "base spaces differ from closure(Y_k)")?;
        shapes.push((rsh.matrix_sizes, rsh.base_spaces));
    }
    ensure(shapes[0] == shapes[1], "trivial bundle changes the stage shape")?;
    Ok("sizes (1,2,3), bases = closure(Y_k), trivial bundle identical".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("tower covering identity", tower_covering),
        ("cantor case", cantor_case),
        ("brute-force return times", brute_force_returns),
        ("cocycle and chart consistency", cocycle_and_charts),
        ("covariance identities", covariance),
        ("gauge equivariance", gauge),
        ("psi inner products", psi),
        ("boundary decomposition", bdp),
        ("lift round trip", lift),
        ("rsh assembly", rsh_assembly),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
