//! Acceptance criteria, one line per criterion. Runs as a plain binary so
//! the report is always printed; exits non-zero if any criterion fails.

mod support;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use pedreach_core::modal::{
    chunk_is_relevant, estimate_input_zonotope, select_chunks, ModeLabel, PedestrianQuery, TrajectoryChunk,
};
use pedreach_core::reach::{build_data_matrices, compute_model_set, reach_horizon, ModelSet, NoiseSpec, StateInputTrajectory};
use pedreach_core::zonoset::{MatrixZonotope, Zonotope};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use support::*;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [-1, 1], with a fifth of the draws pinned to +-1.
fn coefficient(r: &mut impl Rng) -> f64 {
    if r.gen_bool(0.2) {
        if r.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    } else {
        r.gen_range(-1.0..=1.0)
    }
}

fn sample(r: &mut impl Rng, z: &Zonotope) -> DVector<f64> {
    let mut p = z.center().clone();
    for j in 0..z.num_generators() {
        p += z.generators().column(j) * coefficient(r);
    }
    p
}

fn uniform_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.gen_range(-1.0..=1.0))
}

fn noise_box(radius: f64) -> Zonotope {
    Zonotope::new(DVector::zeros(2), DMatrix::identity(2, 2) * radius).unwrap()
}

/// One random 2-state, 2-input system with its recorded experiments.
struct System {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    chunks: Vec<TrajectoryChunk>,
}

const TRAJECTORIES: usize = 10;
const STEPS: usize = 10;

fn random_system(r: &mut impl Rng, noise: &Zonotope) -> System {
    let raw = uniform_matrix(r, 2, 2);
    let rho = raw.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
    let a = if rho > 0.0 { raw * (r.gen_range(0.3..=1.1) / rho) } else { raw };
    let b = uniform_matrix(r, 2, 2);

    // Shared nominal input schedule, perturbed per experiment.
    let nominal: Vec<DVector<f64>> = (0..STEPS).map(|_| DVector::from_fn(2, |_, _| r.gen_range(-1.0..=1.0))).collect();
    let mut chunks = Vec::new();
    for _ in 0..TRAJECTORIES {
        let mut x = DVector::from_fn(2, |_, _| r.gen_range(-1.0..=1.0));
        let mut points = vec![x.clone()];
        let mut inputs = Vec::new();
        for u0 in &nominal {
            let u = u0 + DVector::from_fn(2, |_, _| r.gen_range(-0.3..=0.3));
            x = &a * &x + &b * &u + sample(r, noise);
            points.push(x.clone());
            inputs.push(u);
        }
        chunks.push(TrajectoryChunk::new(points, inputs, ModeLabel::crossing(), 1.0).unwrap());
    }
    System { a, b, chunks }
}

fn model_of(system: &System, spec: &NoiseSpec) -> ModelSet {
    let trajectories: Vec<StateInputTrajectory> = system.chunks.iter().map(|c| c.to_trajectory()).collect();
    compute_model_set(&build_data_matrices(&trajectories).unwrap(), spec).unwrap()
}

fn systems(noise: &Zonotope) -> Vec<System> {
    let mut r = rng(2024);
    (0..20).map(|_| random_system(&mut r, noise)).collect()
}

/// `center + sum beta_i G_i`, evaluated here rather than by the library.
fn matrix_at(m: &MatrixZonotope, beta: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.center().clone();
    for (g, b) in m.generators().iter().zip(beta.iter()) {
        out += g * *b;
    }
    out
}

fn criterion_1() -> Verdict {
    let started = Instant::now();
    let noise = noise_box(0.005);
    let spec = NoiseSpec::new(noise.clone());
    let mut contained = 0;
    let mut worst = 0.0f64;
    let all = systems(&noise);
    for system in &all {
        let model = model_of(system, &spec);
        let truth = {
            let mut ab = DMatrix::zeros(2, 4);
            ab.view_mut((0, 0), (2, 2)).copy_from(&system.a);
            ab.view_mut((0, 2), (2, 2)).copy_from(&system.b);
            ab
        };
        if let Some(beta) = model.matrix_zonotope().find_coefficients(&truth).unwrap() {
            let residual = (matrix_at(model.matrix_zonotope(), &beta) - &truth).amax();
            worst = worst.max(residual);
            if residual <= 1e-9 && beta.amax() <= 1.0 + 1e-9 {
                contained += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    let line = format!(
        "{contained}/{} systems contain [A B], max residual {worst:.1e}, {:.2} s",
        all.len(),
        elapsed.as_secs_f64()
    );
    if contained == all.len() && elapsed < Duration::from_secs(5) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_2() -> Verdict {
    let noise = noise_box(0.005);
    let spec = NoiseSpec::new(noise.clone());
    let all = systems(&noise);
    let started = Instant::now();
    let mut r = rng(77);
    let mut violations = 0usize;
    let mut checks = 0usize;
    for system in &all {
        let kept: Vec<&TrajectoryChunk> = system.chunks.iter().collect();
        let inputs: Vec<Zonotope> = (0..STEPS).map(|k| estimate_input_zonotope(&kept, k).unwrap()).collect();
        let mean_start = kept.iter().map(|c| c.start()).fold(DVector::zeros(2), |acc, s| acc + s) / kept.len() as f64;
        let r0 = Zonotope::from_center_radius(mean_start, &DVector::from_element(2, 0.2)).unwrap();
        let model = model_of(system, &spec);
        let sets = reach_horizon(&model, &r0, &inputs, &spec, 20.0).unwrap();
        for _ in 0..10_000 {
            let mut x = sample(&mut r, &r0);
            for (k, u_set) in inputs.iter().enumerate() {
                let u = sample(&mut r, u_set);
                x = &system.a * &x + &system.b * &u + sample(&mut r, &noise);
                checks += 1;
                if !sets[k].contains_point(&x).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let line = format!(
        "{violations} violations in {checks} rollout steps (20 systems x 10^4 x 10), {:.2} s",
        elapsed.as_secs_f64()
    );
    if violations == 0 && elapsed < Duration::from_secs(30) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_3() -> Verdict {
    let zero = Zonotope::singleton(DVector::zeros(2)).unwrap();
    let spec = NoiseSpec::new(zero.clone());
    let mut worst_model = 0.0f64;
    let mut worst_rollout = 0.0f64;
    let mut all_singletons = true;
    let mut r = rng(5);
    for system in systems(&zero) {
        let model = model_of(&system, &spec);
        let center = model.matrix_zonotope().center();
        worst_model = worst_model
            .max((center.columns(0, 2) - &system.a).amax())
            .max((center.columns(2, 2) - &system.b).amax());

        let x0 = DVector::from_fn(2, |_, _| r.gen_range(-1.0..=1.0));
        let us: Vec<DVector<f64>> = (0..STEPS).map(|_| DVector::from_fn(2, |_, _| r.gen_range(-1.0..=1.0))).collect();
        let inputs: Vec<Zonotope> = us.iter().map(|u| Zonotope::singleton(u.clone()).unwrap()).collect();
        let sets = reach_horizon(&model, &Zonotope::singleton(x0.clone()).unwrap(), &inputs, &spec, 20.0).unwrap();
        let mut x = x0;
        for (u, set) in us.iter().zip(&sets) {
            x = &system.a * &x + &system.b * u;
            all_singletons &= set.generators().iter().all(|v| *v == 0.0);
            worst_rollout = worst_rollout.max((set.center() - &x).amax());
        }
    }
    let line = format!("model center error {worst_model:.1e}, rollout error {worst_rollout:.1e}, singletons {all_singletons}");
    if worst_model <= 1e-9 && worst_rollout <= 1e-9 && all_singletons {
        Ok(line)
    } else {
        Err(line)
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull of all `2^m` generator sign combinations (monotone chain, CCW).
fn vertex_hull(z: &Zonotope) -> Vec<[f64; 2]> {
    let m = z.num_generators();
    let mut pts: Vec<[f64; 2]> = (0..1usize << m)
        .map(|mask| {
            let mut p = [z.center()[0], z.center()[1]];
            for j in 0..m {
                let s = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                p[0] += s * z.generators()[(0, j)];
                p[1] += s * z.generators()[(1, j)];
            }
            p
        })
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    ((p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)).sqrt()
}

fn criterion_4() -> Verdict {
    let mut r = rng(4);
    let (mut agree, mut compared, mut skipped) = (0, 0, 0);
    while compared < 10_000 {
        let m = r.gen_range(1..=6);
        let z = Zonotope::new(
            DVector::from_fn(2, |_, _| r.gen_range(-2.0..=2.0)),
            uniform_matrix(&mut r, 2, m),
        )
        .unwrap();
        let hull = vertex_hull(&z);
        let bx = z.interval_hull();
        let p = [
            r.gen_range(bx.lower()[0] - 0.2..=bx.upper()[0] + 0.2),
            r.gen_range(bx.lower()[1] - 0.2..=bx.upper()[1] + 0.2),
        ];
        let n = hull.len();
        let boundary = (0..n).map(|i| segment_distance(p, hull[i], hull[(i + 1) % n])).fold(f64::INFINITY, f64::min);
        if boundary < 1e-7 {
            skipped += 1;
            continue;
        }
        // A segment (single generator) contains nothing off its boundary.
        let inside = n >= 3 && (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0.0);
        let lp = z.contains_point(&DVector::from_column_slice(&p)).unwrap();
        compared += 1;
        agree += usize::from(inside == lp);
    }
    let line = format!("{agree}/{compared} agree ({skipped} near-boundary pairs skipped)");
    if agree == compared {
        Ok(line)
    } else {
        Err(line)
    }
}

fn two_point_chunk(start: [f64; 2], heading: f64, label: ModeLabel) -> TrajectoryChunk {
    let s = DVector::from_column_slice(&start);
    let step = DVector::from_vec(vec![heading.cos(), heading.sin()]) * 0.13;
    TrajectoryChunk::new(vec![s.clone(), &s + &step], vec![step / 0.1], label, 0.1).unwrap()
}

fn criterion_5() -> Verdict {
    // Crossing-region scene: only the first chunk matches label, start and heading.
    let query = PedestrianQuery::new(noise_box(0.5), FRAC_PI_2, FRAC_PI_6, 1).unwrap();
    let fixture = vec![
        two_point_chunk([0.1, -0.2], FRAC_PI_2 + 0.2, ModeLabel::crossing()),
        two_point_chunk([2.0, 0.0], FRAC_PI_2, ModeLabel::crossing()),
        two_point_chunk([0.0, 0.0], 0.0, ModeLabel::crossing()),
        two_point_chunk([-0.3, 0.3], FRAC_PI_2, ModeLabel::walking_along()),
    ];
    let kept = select_chunks(&fixture, &ModeLabel::crossing(), &query).unwrap();
    let fixture_ok = kept.len() == 1 && std::ptr::eq(kept[0], &fixture[0]);

    let labels = [ModeLabel::crossing(), ModeLabel::walking_along(), ModeLabel::other()];
    let mut r = rng(55);
    let (mut agree, mut total) = (0, 0);
    while total < 1000 {
        let m = r.gen_range(1..=4);
        let x_p = Zonotope::new(DVector::from_fn(2, |_, _| r.gen_range(-1.0..=1.0)), uniform_matrix(&mut r, 2, m)).unwrap();
        let hull = vertex_hull(&x_p);
        let q = PedestrianQuery::new(x_p.clone(), r.gen_range(-PI..PI), r.gen_range(0.0..=PI), 1).unwrap();
        let bx = x_p.interval_hull();
        let start = [
            r.gen_range(bx.lower()[0] - 0.3..=bx.upper()[0] + 0.3),
            r.gen_range(bx.lower()[1] - 0.3..=bx.upper()[1] + 0.3),
        ];
        let mode = labels[r.gen_range(0..3)].clone();
        let chunk = two_point_chunk(start, r.gen_range(-PI..PI), labels[r.gen_range(0..3)].clone());

        let n = hull.len();
        let heading = chunk.initial_heading();
        let d = heading - q.heading();
        let offset = d.sin().atan2(d.cos());
        let boundary = (0..n).map(|i| segment_distance(start, hull[i], hull[(i + 1) % n])).fold(f64::INFINITY, f64::min);
        if boundary < 1e-7 || (offset.abs() - q.heading_limit()).abs() < 1e-9 {
            continue;
        }
        let expected = chunk.label() == &mode
            && n >= 3
            && (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], start) >= 0.0)
            && -q.heading_limit() < offset
            && offset <= q.heading_limit();
        total += 1;
        agree += usize::from(chunk_is_relevant(&chunk, &mode, &q).unwrap() == expected);
    }
    let line = format!("fixture keeps {} chunk(s); {agree}/{total} randomized decisions agree", kept.len());
    if fixture_ok && agree == total {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_6() -> Verdict {
    let mut r = rng(66);
    let (mut inside, mut total) = (0, 0);
    for _ in 0..1000 {
        let n = r.gen_range(1..=15);
        let len = r.gen_range(2..=12);
        let base = DVector::from_fn(2, |_, _| r.gen_range(-2.0..=2.0));
        let spread = r.gen_range(0.0..=1.0);
        let chunks: Vec<TrajectoryChunk> = (0..n)
            .map(|_| {
                let mut x = DVector::from_fn(2, |_, _| r.gen_range(-1.0..=1.0));
                let mut points = vec![x.clone()];
                let mut inputs = Vec::new();
                for _ in 1..len {
                    let u = &base + DVector::from_fn(2, |_, _| r.gen_range(-spread..=spread));
                    x += &u * 0.1;
                    points.push(x.clone());
                    inputs.push(u);
                }
                TrajectoryChunk::new(points, inputs, ModeLabel::crossing(), 0.1).unwrap()
            })
            .collect();
        let kept: Vec<&TrajectoryChunk> = chunks.iter().collect();
        for k in 0..len - 1 {
            let u_k = estimate_input_zonotope(&kept, k).unwrap();
            for c in &kept {
                total += 1;
                inside += usize::from(u_k.contains_point(&c.inputs()[k]).unwrap());
            }
        }
    }
    let line = format!("{inside}/{total} observed inputs inside their step's input zonotope");
    if inside == total {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_7() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let csv = generate(dir.path(), FIXTURE.as_ref());
    let metrics = dir.path().join("metrics.json");
    run_ok(&["evaluate", "--config", FIXTURE, "--data", s(&csv), "--out", s(&metrics)]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&metrics).unwrap()).unwrap();
    let crossing = doc["modes"].as_array().unwrap().iter().find(|m| m["name"] == "crossing").cloned().unwrap_or(Value::Null);
    let ratio = crossing["area_ratio"].as_f64();
    let line = format!(
        "crossing area ratio at k = N: {}, {} kept chunks, containment rate {}",
        ratio.map_or("missing".into(), |v| format!("{v:.4}")),
        crossing["kept_chunks"],
        crossing["containment_rate"]
    );
    match ratio {
        Some(v) if v < 0.9 => Ok(line),
        _ => Err(line),
    }
}

fn criterion_8() -> Verdict {
    let mut r = rng(88);
    let mut report = Vec::new();
    let mut ok = true;
    for order in [1.0, 2.0, 5.0] {
        let (mut inside, mut total) = (0, 0);
        let mut hull_exact = true;
        for _ in 0..100 {
            let dim = r.gen_range(2..=4);
            let m = (order as usize) * dim + r.gen_range(1..=10);
            let z = Zonotope::new(DVector::from_fn(dim, |_, _| r.gen_range(-3.0..=3.0)), uniform_matrix(&mut r, dim, m)).unwrap();
            let reduced = z.reduce_order(order).unwrap();
            if order == 1.0 {
                let box_ = z.interval_hull();
                let diagonal = (0..reduced.generators().nrows())
                    .all(|i| (0..reduced.generators().ncols()).all(|j| i == j || reduced.generators()[(i, j)] == 0.0));
                hull_exact &= reduced.interval_hull() == box_ && diagonal && reduced.center() == z.center();
            }
            for _ in 0..100 {
                total += 1;
                inside += usize::from(reduced.contains_point(&sample(&mut r, &z)).unwrap());
            }
        }
        ok &= inside == total && hull_exact;
        report.push(format!("order {order}: {inside}/{total}{}", if order == 1.0 { format!(", hull exact {hull_exact}") } else { String::new() }));
    }
    let line = report.join("; ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let csv = generate(dir.path(), FIXTURE.as_ref());
    let mut outputs = Vec::new();
    for name in ["first.json", "second.json"] {
        let out = dir.path().join(name);
        run_ok(&["predict", "--config", FIXTURE, "--data", s(&csv), "--out", s(&out), "--compare-pooled"]);
        outputs.push(std::fs::read(&out).unwrap());
    }
    let line = format!("two predict runs, {} and {} bytes", outputs[0].len(), outputs[1].len());
    if outputs[0] == outputs[1] && !outputs[0].is_empty() {
        Ok(format!("{line}, identical"))
    } else {
        Err(format!("{line}, differ"))
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("model-set soundness", criterion_1),
        ("reachability soundness", criterion_2),
        ("noise-free exactness", criterion_3),
        ("containment oracle equivalence", criterion_4),
        ("chunk selection", criterion_5),
        ("input zonotope containment", criterion_6),
        ("modal tightening", criterion_7),
        ("order reduction soundness", criterion_8),
        ("predict determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("acceptance {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
