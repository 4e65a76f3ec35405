//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::time::{Duration, Instant};

use blendspline::cli::{check_closure, check_junctions, generate, TestDataSpec};
use blendspline::manifold::Counting;
use blendspline::model::ModelFile;
use blendspline::oracle::{discretized_energy_min, energy_of, EnergyCurve};
use blendspline::{
    fit, solve_smoothing_spline, BlendedSpline, Euclidean, FitProblem, KnotGrid, Manifold,
    ManifoldKind, Point, So3, Sphere2, TangentVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn euclidean_reduction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let m = [3usize, 10, 50][case % 3];
        let r = 1 + (case / 3) % 3;
        let lambda = [0.1, 1.0, 100.0][(case / 9 + case) % 3];
        let n = rng.random_range(1..=6usize);
        let mut times: Vec<f64> = (0..=m).map(|_| rng.random_range(0.0..=n as f64)).collect();
        times.sort_by(f64::total_cmp);
        if times.windows(2).any(|w| w[1] - w[0] < 1e-9) {
            return Err("degenerate random times".into());
        }
        let rows: Vec<Vec<f64>> = (0..=m)
            .map(|_| (0..r).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let points = rows.iter().cloned().map(Point::new).collect();
        let blended = fit(
            Euclidean::new(r),
            &FitProblem::new(times.clone(), points, n, lambda).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let direct =
            solve_smoothing_spline(&KnotGrid::new(times, n as f64).unwrap(), &rows, lambda)
                .unwrap();
        for k in 0..1000 {
            let t = n as f64 * k as f64 / 999.0;
            worst = worst.max(gap(
                blended.eval(t).unwrap().coords(),
                &direct.eval(t).unwrap(),
            ));
        }
    }
    within(Duration::from_secs(5), start.elapsed())?;
    if worst <= 1e-9 {
        Ok(format!(
            "20 problems, max deviation {worst:.2e}, {:?}",
            start.elapsed()
        ))
    } else {
        Err(format!("max deviation {worst:.2e} > 1e-9"))
    }
}

fn oracle_equivalence() -> Outcome {
    const NODES: usize = 2001;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_value, mut worst_energy) = (0.0f64, f64::NEG_INFINITY);
    let mut problems = 0;
    for m in 1..=6usize {
        for lambda in [0.1, 10.0, 1e4] {
            // Roughly unit spacing with jitter; every time sits on an oracle node.
            let span = m as f64;
            let per = (NODES - 1) / m;
            let ticks: Vec<usize> = (0..=m)
                .map(|i| match i {
                    0 => 0,
                    i if i == m => NODES - 1,
                    i => i * per + rng.random_range(0..per / 2) - per / 4,
                })
                .collect();
            let times: Vec<f64> = ticks
                .iter()
                .map(|&k| span * k as f64 / (NODES - 1) as f64)
                .collect();
            let data: Vec<Vec<f64>> = times
                .iter()
                .map(|_| vec![rng.random_range(-1.0..1.0)])
                .collect();

            let spline = solve_smoothing_spline(
                &KnotGrid::from_times(times.clone()).unwrap(),
                &data,
                lambda,
            )
            .unwrap();
            let oracle =
                discretized_energy_min(&times, &data, lambda, NODES).map_err(|e| e.to_string())?;
            for &t in &times {
                worst_value =
                    worst_value.max((spline.eval(t).unwrap()[0] - oracle.value_at(t)[0]).abs());
            }
            let excess = energy_of(&spline, &times, &data, lambda)
                - energy_of(&oracle, &times, &data, lambda);
            worst_energy = worst_energy.max(excess);
            problems += 1;
        }
    }
    within(Duration::from_secs(10), start.elapsed())?;
    if worst_value <= 1e-3 && worst_energy <= 1e-3 {
        Ok(format!(
            "{problems} problems, max value gap {worst_value:.2e}, max energy excess {worst_energy:.2e}, {:?}",
            start.elapsed()
        ))
    } else {
        Err(format!(
            "value gap {worst_value:.2e}, energy excess {worst_energy:.2e}"
        ))
    }
}

fn fit_sphere(spec: &TestDataSpec, n: usize, lambda: f64) -> (BlendedSpline<Sphere2>, Vec<Point>) {
    let d = generate(spec).expect("test data");
    let points = d.points.clone();
    let b = fit(
        Sphere2,
        &FitProblem::new(d.times, d.points, n, lambda).unwrap(),
    )
    .expect("fit");
    (b, points)
}

fn interpolation_limit() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let (b, data) = fit_sphere(&TestDataSpec::sphere_walk(seed), 9, 1e8);
        for (i, d) in data.iter().enumerate() {
            worst = worst.max(Sphere2.dist(&b.eval(i as f64).unwrap(), d).unwrap());
        }
    }
    within(Duration::from_secs(1), start.elapsed())?;
    if worst <= 1e-6 {
        Ok(format!(
            "5 random walks, max dist(B(i), d_i) = {worst:.2e}, {:?}",
            start.elapsed()
        ))
    } else {
        Err(format!("max dist(B(i), d_i) = {worst:.2e} > 1e-6"))
    }
}

fn c1_property() -> Outcome {
    let (walk, _) = fit_sphere(&TestDataSpec::sphere_walk(3), 9, 1e8);
    let (noisy, _) = fit_sphere(&TestDataSpec::noisy_sphere(2024), 4, 100.0);
    let mut lines = Vec::new();
    for (name, b) in [("interpolating walk", &walk), ("noisy 100 points", &noisy)] {
        let r = check_junctions(b);
        if !r.passed {
            return Err(format!("{name}: {}", r.detail));
        }
        lines.push(format!("{name}: {}", r.detail));
    }
    Ok(lines.join("; "))
}

fn closure() -> Outcome {
    let (walk, _) = fit_sphere(&TestDataSpec::sphere_walk(3), 9, 1e8);
    let (noisy, _) = fit_sphere(&TestDataSpec::noisy_sphere(2024), 4, 100.0);
    let rot = generate(&TestDataSpec {
        kind: ManifoldKind::So3,
        dim: 9,
        ..TestDataSpec::noisy_sphere(5)
    })
    .unwrap();
    let so3 = fit(
        So3,
        &FitProblem::new(rot.times, rot.points, 4, 100.0).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let results = [
        check_closure(&walk, 1000),
        check_closure(&noisy, 1000),
        check_closure(&so3, 1000),
    ];
    match results.iter().find(|r| !r.passed) {
        Some(r) => Err(r.detail.clone()),
        None => Ok("3 models (2 sphere, 1 rotation), 1000 samples each".into()),
    }
}

fn cost_properties() -> Outcome {
    let d = generate(&TestDataSpec::sphere_walk(8)).unwrap();
    let b = fit(
        Counting::new(Sphere2),
        &FitProblem::new(d.times, d.points, 9, 1e8).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let samples: Vec<f64> = (0..1000)
        .map(|_| rng.random_range(0.0..=9.0))
        .chain((0..=9).map(f64::from))
        .collect();
    for &t in &samples {
        b.manifold().reset();
        b.eval(t).map_err(|e| e.to_string())?;
        let c = b.manifold().counts();
        if (c.exp, c.log) != (3, 1) {
            return Err(format!("eval({t}) used {} exp and {} log", c.exp, c.log));
        }
    }
    let model = ModelFile::from_spline(&b);
    let json = ModelFile::from_json(&model.to_json().map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let per_interval: Vec<usize> = json
        .intervals
        .iter()
        .map(|iv| {
            iv.left_pieces
                .iter()
                .chain(&iv.right_pieces)
                .map(|p| p.control.len())
                .sum()
        })
        .collect();
    let total = json.tangent_control_count();
    if per_interval.iter().all(|&c| c == 8) && total == 72 {
        Ok(format!(
            "3 exp + 1 log on {} evals; 8 control vectors per interval, {total} total",
            samples.len()
        ))
    } else {
        Err(format!(
            "control vectors per interval {per_interval:?}, total {total}"
        ))
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    UnitSphere.sample(rng)
}

fn manifold_primitives() -> Outcome {
    const PAIRS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut round_trip, mut symmetry) = ([0.0f64; 3], [0.0f64; 3]);

    let e = Euclidean::new(3);
    for _ in 0..PAIRS {
        let x = Point::new(
            (0..3)
                .map(|_| 10.0 * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
        let dir = random_unit(&mut rng);
        let len = rng.random_range(0.0..=1.0);
        let v = TangentVector::new(x.clone(), dir.iter().map(|c| c * len).collect()).unwrap();
        let y = e.exp(&x, &v).unwrap();
        round_trip[0] = round_trip[0].max(gap(e.log(&x, &y).unwrap().coords(), v.coords()));
        symmetry[0] = symmetry[0].max((e.dist(&x, &y).unwrap() - e.dist(&y, &x).unwrap()).abs());
    }

    for _ in 0..PAIRS {
        let x = Point::new(random_unit(&mut rng).to_vec());
        let raw = random_unit(&mut rng);
        let along: f64 = raw.iter().zip(x.coords()).map(|(a, b)| a * b).sum();
        let t: Vec<f64> = raw
            .iter()
            .zip(x.coords())
            .map(|(a, b)| a - along * b)
            .collect();
        let len = rng.random_range(0.0..=1.0) / norm(&t);
        let v = TangentVector::new(x.clone(), t.iter().map(|c| c * len).collect()).unwrap();
        let y = Sphere2.exp(&x, &v).unwrap();
        round_trip[1] = round_trip[1].max(gap(Sphere2.log(&x, &y).unwrap().coords(), v.coords()));
        let z = Point::new(random_unit(&mut rng).to_vec());
        if let (Ok(a), Ok(b)) = (Sphere2.dist(&x, &z), Sphere2.dist(&z, &x)) {
            symmetry[1] = symmetry[1].max((a - b).abs());
        }
    }

    for _ in 0..PAIRS {
        let axis = random_unit(&mut rng);
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let x = So3::from_rotation_vector(axis.map(|a| a * angle));
        let len = rng.random_range(0.0..=1.0) / std::f64::consts::SQRT_2;
        let rate = random_unit(&mut rng).map(|a| a * len);
        let v = So3::tangent_from_body_rate(&x, rate).unwrap();
        let y = So3.exp(&x, &v).unwrap();
        round_trip[2] = round_trip[2].max(gap(So3.log(&x, &y).unwrap().coords(), v.coords()));
        let far = random_unit(&mut rng).map(|a| a * rng.random_range(0.0..3.0));
        let z = So3
            .exp(&x, &So3::tangent_from_body_rate(&x, far).unwrap())
            .unwrap();
        if let (Ok(a), Ok(b)) = (So3.dist(&x, &z), So3.dist(&z, &x)) {
            symmetry[2] = symmetry[2].max((a - b).abs());
        }
    }

    let fmt = |v: [f64; 3]| {
        format!(
            "euclidean {:.1e}, sphere2 {:.1e}, so3 {:.1e}",
            v[0], v[1], v[2]
        )
    };
    if round_trip.iter().all(|&r| r <= 1e-9) && symmetry.iter().all(|&s| s <= 1e-12) {
        Ok(format!(
            "{PAIRS} pairs each; round trip {}; symmetry {}",
            fmt(round_trip),
            fmt(symmetry)
        ))
    } else {
        Err(format!(
            "round trip {}; symmetry {}",
            fmt(round_trip),
            fmt(symmetry)
        ))
    }
}

fn hand_value() -> Outcome {
    let grid = KnotGrid::from_times(vec![0.0, 1.0, 2.0]).unwrap();
    let s =
        solve_smoothing_spline(&grid, &[vec![0.0], vec![1.0], vec![0.0]], f64::INFINITY).unwrap();
    let value = s.eval(0.5).unwrap()[0];
    let energy = s.bending_energy();
    if (value - 0.6875).abs() <= 1e-12 && (energy - 6.0).abs() <= 1e-12 {
        Ok(format!("s(0.5) = {value}, bending energy = {energy}"))
    } else {
        Err(format!("s(0.5) = {value}, bending energy = {energy}"))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("Euclidean reduction", euclidean_reduction),
        ("oracle equivalence", oracle_equivalence),
        ("interpolation limit", interpolation_limit),
        ("C1 continuity", c1_property),
        ("on-manifold closure", closure),
        ("evaluation and storage cost", cost_properties),
        ("manifold primitives", manifold_primitives),
        ("hand-computed spline", hand_value),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
