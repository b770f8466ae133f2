//! Hodge-theoretic identities for the background pair of a config.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gencx::hodge::{
    build_component_operator, build_dh_operator, laplacian, BlockOperator, GreenOperator, InnerProduct, LaplacianKind,
};
use gencx::linalg::c;
use gencx::random::random_spinor;
use gencx::structures::HermitianPair;
use gencx::torus::{
    dh_components, frequency_box, ComponentMap, integrability_check, nijenhuis, Freq, Shift, SpinorField, TorusGeometry, DELTA_MINUS,
    DELTA_MINUS_BAR, DELTA_PLUS, DELTA_PLUS_BAR,
};
use gencx::Exec;

use crate::config::{ConfigError, ExperimentConfig, HodgeSpec};
use crate::report::Report;

pub const DEFAULT_RADIUS: i32 = 2;
pub const DEFAULT_SEED: u64 = 0;

const ANTICOMMUTATOR_TOL: f64 = 1e-10;
const ADJOINT_TOL: f64 = 1e-9;
const LAPLACIAN_TOL: f64 = 1e-9;
const GREEN_TOL: f64 = 1e-9;
const PATTERN_TOL: f64 = 1e-12;
const INTEGRABILITY_SAMPLES: usize = 4;

const COMPONENTS: [(Shift, &str); 4] = [
    (DELTA_PLUS, "delta+"),
    (DELTA_PLUS_BAR, "delta+bar"),
    (DELTA_MINUS, "delta-"),
    (DELTA_MINUS_BAR, "delta-bar"),
];

fn random_field(m: usize, support: &[Freq], rng: &mut ChaCha8Rng) -> SpinorField {
    SpinorField::from_terms(m, support.iter().map(|k| (k.clone(), random_spinor(m, rng))))
}

fn relative(a: &SpinorField, b: &SpinorField) -> f64 {
    a.sub(b).norm() / b.norm().max(1e-300)
}

pub fn run(cfg: &ExperimentConfig, exec: Exec) -> Result<Report, ConfigError> {
    let pair = cfg.pair()?;
    let geom = cfg.geometry()?;
    let spec = cfg.hodge.unwrap_or(HodgeSpec {
        radius: DEFAULT_RADIUS,
        seed: DEFAULT_SEED,
    });
    let m = cfg.dimension;

    let mut report = Report::new("verify-hodge");
    report.param("dimension", m as u64);
    report.param("radius", spec.radius);
    report.param("seed", spec.seed);
    report.param("anticommutator_tol", ANTICOMMUTATOR_TOL);
    report.param("adjoint_tol", ADJOINT_TOL);
    report.param("laplacian_tol", LAPLACIAN_TOL);
    report.param("green_tol", GREEN_TOL);
    report.param("pattern_tol", PATTERN_TOL);

    let support = frequency_box(m, spec.radius);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sample = random_field(m, &support, &mut rng);
    let components = dh_components(exec, &sample, &pair, &geom);
    let scale = sample.norm();

    let int1 = integrability_check(pair.j1(), &geom, spec.seed, INTEGRABILITY_SAMPLES);
    let int2 = integrability_check(pair.j2(), &geom, spec.seed.wrapping_add(1), INTEGRABILITY_SAMPLES);
    report.info("J1 integrability residual", int1.residual);
    report.info("J2 integrability residual", int2.residual);

    if !(int1.integrable && int2.integrable) {
        torsion_components(&mut report, exec, &pair, &geom, &components, scale, [int1.integrable, int2.integrable]);
        for name in ["anticommutators", "adjoints", "Laplacian ratios", "Green operator identities"] {
            report.skip(name, "pair is not generalized Kaehler");
        }
        return Ok(report);
    }

    let allowed: Vec<Shift> = COMPONENTS.iter().map(|(s, _)| *s).collect();
    report.bound(
        "components of d^H outside delta+-, delta+-bar",
        components.norm_outside(&allowed) / scale,
        PATTERN_TOL,
    );
    for (shift, name) in COMPONENTS {
        report.info(format!("{name} component size"), components.norm(shift) / scale);
    }

    let ip = InnerProduct::new(&pair).map_err(|e| ConfigError(format!("background: {e}")))?;
    let op = |s| build_component_operator(exec, s, &pair, &geom, &support).expect("admissible shift");
    let [dp, dpb, dm, dmb] = COMPONENTS.map(|(s, _)| op(s));
    anticommutators(&mut report, [&dp, &dpb, &dm, &dmb]);

    report.bound("delta+^* = -delta+bar", dp.adjoint(&ip).distance(&dpb.scale(c(-1.0))), ADJOINT_TOL);
    report.bound("delta-^* = delta-bar", dm.adjoint(&ip).distance(&dmb), ADJOINT_TOL);

    let full = laplacian(&build_dh_operator(exec, &geom, &support), &ip);
    for (o, (_, name)) in [&dp, &dpb, &dm, &dmb].into_iter().zip(COMPONENTS) {
        let lap = laplacian(o, &ip);
        report.bound(format!("Lap(dH) = 4 Lap({name})"), full.distance(&lap.scale(c(4.0))), LAPLACIAN_TOL);
    }
    let probe = random_field(m, &support, &mut rng);
    let num = ip.l2(&full.apply(exec, &probe), &probe).re;
    let den = ip.l2(&laplacian(&dp, &ip).apply(exec, &probe), &probe).re;
    report.info("Rayleigh ratio Lap(dH) / Lap(delta+)", num / den);

    green_identities(&mut report, exec, &pair, &geom, &support, &mut rng)?;
    Ok(report)
}

fn anticommutators(report: &mut Report, [dp, dpb, dm, dmb]: [&BlockOperator; 4]) {
    let anti = |a: &BlockOperator, b: &BlockOperator| a.compose(b).add(&b.compose(a));
    report.bound("delta+^2", dp.compose(dp).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("delta+bar^2", dpb.compose(dpb).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("delta-^2", dm.compose(dm).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("delta-bar^2", dmb.compose(dmb).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("{delta+, delta-}", anti(dp, dm).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("{delta+, delta-bar}", anti(dp, dmb).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("{delta+bar, delta-}", anti(dpb, dm).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound("{delta+bar, delta-bar}", anti(dpb, dmb).max_abs(), ANTICOMMUTATOR_TOL);
    report.bound(
        "{delta+, delta+bar} + {delta-, delta-bar}",
        anti(dp, dpb).add(&anti(dm, dmb)).max_abs(),
        ANTICOMMUTATOR_TOL,
    );
}

fn green_identities(
    report: &mut Report,
    exec: Exec,
    pair: &HermitianPair,
    geom: &TorusGeometry,
    support: &[Freq],
    rng: &mut ChaCha8Rng,
) -> Result<(), ConfigError> {
    let green = GreenOperator::new(pair, geom, LaplacianKind::DeltaPlus).map_err(|e| ConfigError(format!("background: {e}")))?;
    let sigma = random_field(pair.dim(), support, rng);
    let exact = geom.dh_apply(exec, &sigma);
    if exact.norm() == 0.0 {
        report.skip("exact forms have no harmonic part", "d^H vanishes on the sample");
    } else {
        let harmonic = green.harmonic_part(exec, &exact);
        report.bound("exact forms have no harmonic part", harmonic.norm() / exact.norm(), GREEN_TOL);
    }
    let lhs = green.apply(exec, &exact);
    let rhs = geom.dh_apply(exec, &green.apply(exec, &sigma));
    let value = if rhs.norm() == 0.0 { lhs.norm() } else { relative(&lhs, &rhs) };
    report.bound("G commutes with d^H", value, GREEN_TOL);
    Ok(())
}

/// Components of `d^H` that shift one of the two degrees by three.
fn torsion_components(
    report: &mut Report,
    exec: Exec,
    pair: &HermitianPair,
    geom: &TorusGeometry,
    components: &ComponentMap,
    scale: f64,
    integrable: [bool; 2],
) {
    for (idx, (ok, j)) in integrable.into_iter().zip([pair.j1(), pair.j2()]).enumerate() {
        let label = idx + 1;
        let mut total = 0.0;
        for shift in components.shifts() {
            let moved = if idx == 0 { shift.0 } else { shift.1 };
            if moved.abs() == 3 {
                let size = components.norm(shift) / scale;
                total += size * size;
                report.info(format!("J{label} torsion component ({}, {})", shift.0, shift.1), size);
            }
        }
        let total = total.sqrt();
        report.info(format!("J{label} Nijenhuis tensor max entry"), nijenhuis(exec, j, geom).max_abs());
        if ok {
            report.bound(format!("J{label} torsion components vanish"), total, PATTERN_TOL);
        } else {
            report.above(format!("J{label} torsion components are nonzero"), total, PATTERN_TOL);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn kaehler_t2_passes() {
        let cfg = config("dimension = 2\n[background]\nkind = \"kaehler\"\n");
        let r = run(&cfg, Exec::Sequential).unwrap();
        assert!(r.passed, "{}", r.to_text());
        assert!(r.checks.iter().any(|c| c.name.starts_with("Lap(dH)")));
    }

    #[test]
    fn hermitian_only_reports_torsion() {
        let cfg = config(
            "dimension = 4\n[background]\nkind = \"kaehler\"\n[[flux]]\nindices = [0, 1, 2]\nvalue = 1.0\n[hodge]\nradius = 1\nseed = 3\n",
        );
        let r = run(&cfg, Exec::Sequential).unwrap();
        assert!(r.passed, "{}", r.to_text());
        assert!(r.checks.iter().any(|c| c.name == "J2 torsion components are nonzero"));
        assert!(r.checks.iter().any(|c| c.name == "anticommutators"));
    }
}
