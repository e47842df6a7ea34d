//! Acceptance suite. Each criterion prints one PASS/FAIL line on stderr
//! (written directly, so it shows without `--nocapture`) and then asserts.

use std::io::Write;
use std::process::Command;

use holonomy::cli::RotationDoc;
use holonomy::connections::{natural_form, plane_rolling_form, pullback_form, rho_j_map};
use holonomy::lie::{exp_so3, Rotation, Vec3};
use holonomy::paths::{custom, great_arc, line, polyline, PathSpec};
use holonomy::surface::SphereChart;
use holonomy::transport::{
    commutator_by_flows, convergence_order, small_loop_curvature, time_ordered_product, transport, IntegratorConfig,
    Method,
};
use holonomy::verify::{self, ResidualReport, DEFAULT_SEED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    lines: Vec<(bool, String)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.lines.push((ok, detail.into()));
    }

    fn within(&mut self, label: &str, value: f64, tol: f64) {
        self.check(value <= tol, format!("{label} {value:.3e} <= {tol:.0e}"));
    }

    fn report(&mut self, r: &ResidualReport) {
        self.within(&r.name, r.max_residual, r.tolerance);
    }

    fn finish(self, n: usize, title: &str) {
        let ok = self.lines.iter().all(|(p, _)| *p);
        let detail: Vec<&str> = self.lines.iter().map(|(p, d)| if *p { d.as_str() } else { "" }).filter(|d| !d.is_empty()).collect();
        let failed: Vec<&str> = self.lines.iter().filter(|(p, _)| !*p).map(|(_, d)| d.as_str()).collect();
        let line = if ok {
            format!("acceptance {n:>2} PASS {title}: {}\n", detail.join("; "))
        } else {
            format!("acceptance {n:>2} FAIL {title}: {}\n", failed.join("; "))
        };
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(ok, "{line}");
    }
}

fn unit_random(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        if v.norm() > 0.1 && v.norm() <= 1.0 {
            return v.normalize();
        }
    }
}

fn twisted_cubic() -> PathSpec {
    custom(3, |t| vec![t, t * t, t * t * t], Some(|t: f64| vec![1.0, 2.0 * t, 3.0 * t * t])).unwrap()
}

#[test]
fn criterion_01_exponential_theorem() {
    let mut out = Outcome::new();
    let dir = Vec3::new(0.3, -0.8, 0.52).normalize();
    let cfg = IntegratorConfig::new(Method::ExpMidpoint, 10_000);
    for norm in [0.1, 1.0, 3.0] {
        let xi = dir * norm;
        let c = line(&[0.0; 3], xi.as_slice()).unwrap();
        let g = transport(&natural_form(), &c, &Rotation::identity(), &cfg).unwrap().final_value;
        out.within(&format!("|xi|={norm}"), g.distance(&exp_so3(&xi)), 1e-8);
    }
    out.finish(1, "transport along t*xi is exp(xi)");
}

#[test]
fn criterion_02_line_shift() {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let cfg = IntegratorConfig::new(Method::ExpMidpoint, 10_000);
    let xi = Vec3::new(0.7, 1.1, -0.4);
    let g0 = exp_so3(&(unit_random(&mut rng) * 2.3));
    let mut finals = Vec::new();
    for _ in 0..3 {
        let eta = unit_random(&mut rng) * rng.random_range(0.0..5.0);
        let c = line(eta.as_slice(), xi.as_slice()).unwrap();
        let g = transport(&natural_form(), &c, &g0, &cfg).unwrap().final_value;
        out.within("exp(xi) g0", g.distance(&(exp_so3(&xi) * g0)), 1e-8);
        finals.push(g);
    }
    let spread = finals.windows(2).map(|w| w[0].distance(&w[1])).fold(0.0, f64::max);
    out.within("eta independence", spread, 1e-10);
    out.finish(2, "transport along eta + t*xi is exp(xi) g0");
}

#[test]
fn criterion_03_integrator_orders() {
    let mut out = Outcome::new();
    // with nodes at its corners the natural connection is integrated exactly
    // on any polyline, so the order study runs on a smooth non-commutative curve
    let poly = polyline(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.2, 0.0], vec![0.6, 1.0, 0.5], vec![0.0, 0.4, 1.2]]).unwrap();
    let exact = convergence_order(&natural_form(), &poly, Method::LieEuler, 100).unwrap();
    out.within("polyline error (exact)", exact.error_n, 1e-13);

    let c = twisted_cubic();
    let euler = convergence_order(&natural_form(), &c, Method::LieEuler, 200).unwrap();
    out.within("lie-euler |order-1|", (euler.order - 1.0).abs(), 0.2);
    let mid = convergence_order(&natural_form(), &c, Method::ExpMidpoint, 200).unwrap();
    out.within("exp-midpoint |order-2|", (mid.order - 2.0).abs(), 0.2);

    let reference = transport(&natural_form(), &c, &Rotation::identity(), &IntegratorConfig::new(Method::ExpMidpoint, 100_000))
        .unwrap()
        .final_value;
    let e = |n| time_ordered_product(&natural_form(), &c, n).unwrap().distance(&reference);
    let order = (e(400) / e(800)).log2();
    out.within("time-ordered product |order-1|", (order - 1.0).abs(), 0.2);
    out.finish(3, "integrator orders");
}

#[test]
fn criterion_04_curvature_is_bracket() {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let cfg = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = unit_random(&mut rng) * 3.0;
        let (u, v) = (unit_random(&mut rng), unit_random(&mut rng));
        let est = small_loop_curvature(&natural_form(), x.as_slice(), u.as_slice(), v.as_slice(), 1e-2, &cfg, true).unwrap();
        let exact = u.cross(&v);
        worst = worst.max((est - exact).norm() / exact.norm());
    }
    out.within("small loop rel err (20 pairs)", worst, 1e-4);
    let mut worst: f64 = (commutator_by_flows(&Vec3::x(), &Vec3::y(), 1e-3).unwrap() - Vec3::z()).norm();
    for _ in 0..20 {
        let (a, b) = (unit_random(&mut rng), unit_random(&mut rng));
        worst = worst.max((commutator_by_flows(&a, &b, 1e-3).unwrap() - a.cross(&b)).norm());
    }
    out.within("commutator by flows abs err", worst, 1e-5);
    out.finish(4, "curvature equals the bracket");
}

#[test]
fn criterion_05_plane_rolling() {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let cfg = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        let (a, b) = (rng.random_range(0.0..std::f64::consts::TAU), rng.random_range(0.0..std::f64::consts::TAU));
        let (u, v) = ([a.cos(), a.sin()], [b.cos(), b.sin()]);
        let cross = Vec3::new(u[0], u[1], 0.0).cross(&Vec3::new(v[0], v[1], 0.0));
        if cross.norm() < 0.05 {
            continue;
        }
        let est = small_loop_curvature(&plane_rolling_form(), &x, &u, &v, 1e-2, &cfg, true).unwrap();
        worst = worst.max((est - cross).norm() / cross.norm());
    }
    out.within("small loop rel err", worst, 1e-4);
    let pulled = pullback_form(rho_j_map(), natural_form()).unwrap();
    let mut grid: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let x = [i as f64 * 0.9 - 4.0, j as f64 * 0.7 - 3.0];
            for v in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8], [-1.5, 2.5]] {
                let d = pulled.evaluate(&x, &v).unwrap() - plane_rolling_form().evaluate(&x, &v).unwrap();
                grid = grid.max(d.norm());
            }
        }
    }
    out.within("pullback grid", grid, 1e-12);
    out.finish(5, "plane rolling curvature and pullback identity");
}

#[test]
fn criterion_06_sphere_factor() {
    let mut out = Outcome::new();
    let cfg = IntegratorConfig::default();
    for (r, expected) in [(0.5, -3.0), (2.0, 0.75), (5.0, 0.96)] {
        let f = verify::sphere_curvature_factor(r, &cfg).unwrap();
        out.within(&format!("r={r} factor {f:.6} rel err"), (f - expected).abs() / expected.abs(), 1e-3);
    }
    let f = verify::sphere_curvature_factor(1.0, &cfg).unwrap();
    out.within("r=1 factor", f.abs(), 1e-6);
    out.finish(6, "sphere curvature factor 1 - 1/r^2");
}

#[test]
fn criterion_07_flat_unit_sphere() {
    let mut out = Outcome::new();
    let cfg = IntegratorConfig::default();
    out.report(&verify::check_flat_unit_sphere(5, DEFAULT_SEED, &cfg).unwrap());
    for r in verify::check_section(5, DEFAULT_SEED, &cfg).unwrap() {
        out.report(&r);
    }
    out.report(&verify::check_antipodal(5, DEFAULT_SEED, &cfg).unwrap());
    out.finish(7, "flat outer unit sphere and its section");
}

#[test]
fn criterion_08_inner_unit_sphere() {
    let mut out = Outcome::new();
    let cfg = IntegratorConfig::default();
    out.report(&verify::check_inner_unit_sphere(1.0, 5, DEFAULT_SEED, &cfg).unwrap());
    let (chart, arc) = great_arc(1.0, &Vec3::new(0.3, 0.9, 0.1), &Vec3::new(-0.7, 0.1, -0.6)).unwrap();
    out.report(&verify::inner_sphere_identity(1.0, &chart, &arc, &cfg).unwrap());
    let wander = custom(
        2,
        |t| vec![1.5 + 0.8 * (5.0 * t).sin(), 4.0 * t * t - 1.0],
        Some(|t: f64| vec![4.0 * (5.0 * t).cos(), 8.0 * t]),
    )
    .unwrap();
    out.report(&verify::inner_sphere_identity(1.0, &SphereChart::new(1.0).unwrap(), &wander, &cfg).unwrap());
    out.finish(8, "inner unit sphere transport is the identity");
}

#[test]
fn criterion_09_functoriality() {
    let mut out = Outcome::new();
    out.report(&verify::check_alpha_naturality(100, DEFAULT_SEED));
    out.report(&verify::check_omega_naturality(100, DEFAULT_SEED));
    out.report(&verify::check_curvature_naturality(100, DEFAULT_SEED));
    let cfg = IntegratorConfig::default();
    out.report(&verify::check_transport_naturality(&verify::figure_eight(), &cfg).unwrap());
    out.report(&verify::check_transport_naturality(&line(&[0.0; 3], &[0.4, -0.9, 0.3]).unwrap(), &cfg).unwrap());
    out.finish(9, "naturality under the quaternion cover");
}

#[test]
fn criterion_10_holonomy_span() {
    let mut out = Outcome::new();
    let cfg = IntegratorConfig::default();
    let span = verify::holonomy_span_check(&verify::three_square_loops(), &plane_rolling_form(), &cfg).unwrap();
    out.check(span.sigma_min > verify::SPAN_SIGMA_MIN, format!("three squares sigma_min {:.4}", span.sigma_min));
    let same = vec![verify::square_lasso([5.0, 0.0]).unwrap(); 3];
    let control = verify::holonomy_span_check(&same, &plane_rolling_form(), &cfg).unwrap();
    let rank = control.singular_values.iter().filter(|s| **s > verify::SPAN_SIGMA_MIN).count();
    out.check(rank == 1 && !control.report.pass, format!("repeated loop rank {rank}"));
    out.finish(10, "holonomy logs span so(3)");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holonomy"))
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let o = bin().args(args).output().unwrap();
    (o.status.code().unwrap_or(-1), o.stdout)
}

#[test]
fn criterion_11_cli_contract() {
    let mut out = Outcome::new();
    let requests: [&[&str]; 3] = [
        &["transport", "--connection", "natural-so3", "--path", "line", "--xi", "0,0,1.5707963", "--steps", "1000"],
        &["holonomy", "--connection", "plane-rolling", "--path", "square", "--eps", "1"],
        &["holonomy", "--connection", "sphere-outer", "--radius", "2", "--path", "circle", "--eps", "0.3", "--steps", "2000"],
    ];
    let mut worst: f64 = 0.0;
    let mut identical = true;
    for args in requests {
        let (code, first) = run(args);
        let (_, second) = run(args);
        identical &= code == 0 && first == second;
        let doc: serde_json::Value = serde_json::from_slice(&first).unwrap();
        let get = |k: &str| -> Vec<f64> { serde_json::from_value(doc["holonomy"][k].clone()).unwrap() };
        let rd = RotationDoc {
            matrix: get("matrix").try_into().unwrap(),
            quat: get("quat").try_into().unwrap(),
            axis: get("axis").try_into().unwrap(),
            angle: doc["holonomy"]["angle"].as_f64().unwrap(),
        };
        worst = worst.max(rd.consistency_residual());
        for p in doc["trajectory"].as_array().unwrap() {
            let q: Vec<f64> = serde_json::from_value(p["quat"].clone()).unwrap();
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            worst = worst.max((n - 1.0).abs());
        }
    }
    out.check(identical, "byte-identical JSON on repeat");
    out.within("rotation encodings agree", worst, 1e-9);
    let (fail, _) = run(&["verify", "--check", "inner-sphere", "--radius", "2", "--steps", "2000"]);
    let (pass, _) = run(&["verify", "--check", "inner-sphere", "--radius", "1", "--steps", "2000"]);
    let (bad, _) = run(&["transport", "--bogus"]);
    out.check((pass, fail, bad) == (0, 2, 1), format!("exit codes ok/failing-check/error = {pass}/{fail}/{bad}"));
    out.finish(11, "CLI contract");
}
