//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use absum::error::Error;
use absum::harness::sample::{random_functional, random_slice, random_slice_containing, random_unit_vector};
use absum::harness::{falsify, FalsifierBudget, Verdict};
use absum::norm2::{classify, star_constants, AbsoluteNorm, NormClassification};
use absum::real::{q, Real, Q};
use absum::spaces::{
    brute_slice_sup, daugavet_witness, enumeration_sup, grid_ascent_sup, non_delta_certificate,
    non_delta_certificate_with_alpha, CertKind, DeskSpace, NonDeltaCertificate, PlFn, SearchConfig, SliceSpec, Vector,
};
use absum::sums::{
    aoh_daugavet_point, combine_non_daugavet_certificates, combine_non_deltak_certificates,
    component_witness_from_sum, conjugate_pair_exists, deltak_witness_l1, infty_delta_witness,
    lift_non_delta_certificate, linf_daugavet_point, sum_daugavet_witness, Component, DeltaIndexSet, DeltaKPoint,
    InftyDeltaPoint, Which,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn one_pl() -> Vector {
    Vector::Pl(PlFn::constant(Q::one()))
}

fn l2() -> DeskSpace {
    DeskSpace::lp(2, 2.0)
}

fn e1() -> Vector {
    Vector::coords(vec![Q::one(), Q::zero()])
}

fn c01_component() -> Component {
    Component::new(DeskSpace::c01(), one_pl()).unwrap()
}

fn exact(r: &Real) -> bool {
    r.is_exact()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    for (name, n) in [("l_1", AbsoluteNorm::l1()), ("l_inf", AbsoluteNorm::linf())] {
        let s = Instant::now();
        match classify(&n) {
            NormClassification::Aoh { beta: true, .. } => {}
            other => return Err(format!("{name}: {other:?}")),
        }
        ensure(s.elapsed().as_secs_f64() < 1.0, format!("{name} took too long"))?;
    }
    for p in [1.5, 2.0, 4.0] {
        let s = Instant::now();
        let n = AbsoluteNorm::lp(p).map_err(e)?;
        ensure(matches!(classify(&n), NormClassification::Alpha { .. }), format!("l_{p} not Alpha"))?;
        ensure(s.elapsed().as_secs_f64() < 1.0, format!("l_{p} took too long"))?;
    }
    let hex = AbsoluteNorm::hex();
    ensure(classify(&hex).is_aoh(), "hex not AOH")?;
    let (c, d) = star_constants(&hex);
    ensure(c == Real::Exact(q(1, 4)) && d == Real::Exact(q(1, 4)), format!("hex star constants ({c}, {d})"))?;
    Ok(format!("7 norms in {:.3}s", t.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut n = 0;
    for space in [DeskSpace::c01(), DeskSpace::l1step()] {
        for eps in [q(1, 2), q(1, 10), q(1, 100)] {
            for i in 0..200 {
                let x = random_unit_vector(&space, &mut rng).map_err(e)?;
                let slice = random_slice(&space, &mut rng).map_err(e)?;
                let w = daugavet_witness(&space, &x, &slice, &eps).map_err(|err| format!("{} slice {i}: {err}", space.label()))?;
                let chk = w.check(&space).map_err(e)?;
                let norms_exact = exact(&space.norm(&w.u).map_err(e)?) && exact(&space.norm(&x.sub(&w.u).map_err(e)?).map_err(e)?);
                ensure(chk.valid() && norms_exact, format!("{} slice {i} eps {eps}: {chk:?}", space.label()))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} witnesses verified exactly"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = q(1, 10);
    let mut n = 0;
    for norm in [AbsoluteNorm::l1(), AbsoluteNorm::linf(), AbsoluteNorm::hex()] {
        let p = aoh_daugavet_point(&norm, c01_component(), c01_component()).map_err(e)?;
        for i in 0..100 {
            let slice = random_slice(&p.space, &mut rng).map_err(e)?;
            let w = sum_daugavet_witness(&p, &slice, &eps).map_err(|err| format!("{} slice {i}: {err}", norm.label()))?;
            ensure(w.is_valid(&p.space) && w.distance.is_exact(), format!("{} slice {i}", norm.label()))?;
            n += 1;
        }
    }
    match aoh_daugavet_point(&AbsoluteNorm::l2(), c01_component(), c01_component()) {
        Err(Error::NotAoh) => {}
        other => return Err(format!("l_2 constructor: {other:?}")),
    }
    Ok(format!("{n} sum witnesses valid, l_2 refused with NotAOH"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps = q(3, 10);
    let mut n = 0;
    for norm in [AbsoluteNorm::l1(), AbsoluteNorm::hex()] {
        let p = aoh_daugavet_point(&norm, c01_component(), c01_component()).map_err(e)?;
        for which in [Which::X, Which::Y] {
            for i in 0..100 {
                let slice = random_slice(&DeskSpace::c01(), &mut rng).map_err(e)?;
                let w = component_witness_from_sum(&p, which, &slice, &eps).map_err(|err| format!("{} {which:?} {i}: {err}", norm.label()))?;
                ensure(w.is_valid(&DeskSpace::c01()), format!("{} {which:?} slice {i}", norm.label()))?;
                n += 1;
            }
        }
    }
    let y = Component::new(l2(), e1()).map_err(e)?;
    let p = linf_daugavet_point(c01_component(), q(3, 10), y).map_err(e)?;
    for i in 0..100 {
        let slice = random_slice(&DeskSpace::c01(), &mut rng).map_err(e)?;
        let w = component_witness_from_sum(&p, Which::X, &slice, &eps).map_err(|err| format!("l_inf slice {i}: {err}"))?;
        ensure(w.is_valid(&DeskSpace::c01()), format!("l_inf slice {i}"))?;
        n += 1;
    }
    Ok(format!("{n} component witnesses valid"))
}

/// Checks a certificate against the falsifier, the brute oracle where one
/// exists, and a copy whose claimed bound is 0.1 below the slice supremum.
fn certificate_suite(name: &str, space: &DeskSpace, x: &Vector, cert: &NonDeltaCertificate) -> Result<String, String> {
    let budget = FalsifierBudget::default();
    let out = falsify(space, x, cert, &budget).map_err(e)?;
    ensure(out.verdict == Verdict::Unfalsified, format!("{name}: violated {:?}", out.violation))?;
    let widened = SliceSpec {
        functional: cert.functional.clone(),
        alpha: cert.widened_alpha(),
    };
    let sup = brute_slice_sup(space, x, &widened).map_err(e)?;
    let mut note = format!("{name}: best {:.6}", out.best_distance.unwrap_or(0.0));
    if space.finite_dim().is_some_and(|d| d <= 4) {
        ensure(!sup.lower_bound_only, format!("{name}: no exact brute route"))?;
        let chk = cert.brute_check(space, x).map_err(e)?;
        ensure(chk.holds, format!("{name}: brute sup {} exceeds bound", sup.value))?;
        let best = out.best_distance.unwrap_or(f64::NEG_INFINITY);
        ensure(best <= sup.value.to_f64() + 1e-6, format!("{name}: falsifier {best} above brute sup {}", sup.value))?;
        note += &format!(", brute {:.6}", sup.value.to_f64());
    }
    let mut bad = cert.clone();
    bad.eps = Q::from_integer(2.into()) - absum::real::q_from_f64(sup.value.to_f64() - 0.1).map_err(e)?;
    let small = FalsifierBudget {
        samples: 10_000,
        ..FalsifierBudget::default()
    };
    let out = falsify(space, x, &bad, &small).map_err(e)?;
    ensure(out.verdict == Verdict::Violated, format!("{name}: corrupted certificate survived"))?;
    Ok(note)
}

fn criterion_5() -> Outcome {
    let one = Q::one();
    let base = non_delta_certificate_with_alpha(&l2(), &e1(), &one, &q(1, 4)).map_err(e)?.shrink(q(1, 4), q(1, 2)).map_err(e)?;
    let linf2 = DeskSpace::sum(AbsoluteNorm::linf(), l2(), l2());
    let pair = Vector::pair(e1(), e1());
    let mut notes = Vec::new();

    let mut nd = base.clone();
    nd.kind = CertKind::NonDaugavet;
    let c = combine_non_daugavet_certificates(&nd, &nd).map_err(e)?;
    notes.push(certificate_suite("daugavet combine", &linf2, &pair, &c)?);

    let lifted = lift_non_delta_certificate(&AbsoluteNorm::l1(), &q(1, 2), &q(1, 2), &l2(), &e1(), &DeskSpace::c01(), &one_pl(), &base).map_err(e)?;
    notes.push(certificate_suite("lift", &lifted.space, &lifted.point, &lifted.certificate)?);
    let lifted = lift_non_delta_certificate(&AbsoluteNorm::l1(), &one, &Q::zero(), &l2(), &e1(), &l2(), &e1(), &base).map_err(e)?;
    notes.push(certificate_suite("lift b=0", &lifted.space, &lifted.point, &lifted.certificate)?);

    let two = q(2, 1);
    let k2 = non_delta_certificate_with_alpha(&l2(), &e1(), &two, &q(1, 4)).map_err(e)?;
    let sym = combine_non_deltak_certificates(&two, &k2.shrink(q(1, 4), q(1, 2)).map_err(e)?, &two, &k2.shrink(q(1, 4), q(1, 2)).map_err(e)?).map_err(e)?;
    notes.push(certificate_suite("deltak combine", &linf2, &pair, &sym)?);
    let a1 = non_delta_certificate_with_alpha(&l2(), &e1(), &two, &q(1, 10)).map_err(e)?.shrink(q(1, 10), q(1, 2)).map_err(e)?;
    let a2 = non_delta_certificate_with_alpha(&l2(), &e1(), &two, &q(1, 5)).map_err(e)?.shrink(q(1, 5), q(1, 2)).map_err(e)?;
    let asym = combine_non_deltak_certificates(&two, &a1, &two, &a2).map_err(e)?;
    ensure(asym.alpha == q(2, 15), "asymmetric width")?;
    notes.push(certificate_suite("deltak combine asym", &linf2, &pair, &asym)?);
    Ok(notes.join("; "))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let eps = q(1, 5);
    let mut notes = Vec::new();
    for k in [q(2, 1), q(4, 1)] {
        let p = DeltaKPoint::new(k.clone(), Component::plain(l2(), e1()).map_err(e)?, c01_component()).map_err(e)?;
        for i in 0..100 {
            let slice = random_slice_containing(&p.space, &p.point, &mut rng).map_err(e)?;
            let w = deltak_witness_l1(&p, &slice, &eps).map_err(|err| format!("k={k} slice {i}: {err}"))?;
            ensure(w.slice.alpha == &k * &slice.alpha, "witness slice is not the k-widened one")?;
            ensure(w.is_valid(&p.space), format!("k={k} slice {i}"))?;
        }
        let cx = non_delta_certificate(&l2(), &e1(), &Q::one()).map_err(e)?;
        let a = Q::one() - k.recip();
        let lifted = lift_non_delta_certificate(&AbsoluteNorm::l1(), &a, &k.recip(), &l2(), &e1(), &DeskSpace::c01(), &one_pl(), &cx).map_err(e)?;
        ensure(lifted.point == p.point, "lifted point differs from z")?;
        ensure(lifted.certificate.k.is_one() && lifted.certificate.contains_point(&p.space, &p.point).map_err(e)?, "certificate shape")?;
        let out = falsify(&lifted.space, &lifted.point, &lifted.certificate, &FalsifierBudget::default()).map_err(e)?;
        ensure(out.verdict == Verdict::Unfalsified, format!("k={k}: lifted certificate violated"))?;
        notes.push(format!("k={k}: 100 witnesses, certificate gap {:.3e}", absum::real::q_to_f64(&lifted.certificate.eps)));
    }
    Ok(notes.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let two = q(2, 1);
    let side = || DeltaKPoint::new(two.clone(), Component::plain(l2(), e1()).unwrap(), c01_component()).unwrap().into_oracle();
    let pt = InftyDeltaPoint::new(two.clone(), side(), two.clone(), side()).map_err(e)?;
    let eps = q(1, 5);
    for i in 0..50 {
        let slice = random_slice_containing(&pt.space, &pt.point, &mut rng).map_err(e)?;
        let w = infty_delta_witness(&pt, &slice, &eps).map_err(|err| format!("slice {i}: {err}"))?;
        ensure(w.slice == slice && w.is_valid(&pt.space), format!("slice {i}"))?;
    }
    Ok("50 Delta-witnesses on the nested sum".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut some, mut none) = (0, 0);
    for i in 0..10_000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let d: i64 = rng.gen_range(1..=24);
            q(rng.gen_range(d + 1..=10 * d), d)
        };
        let a = draw(&mut rng);
        // every fourth pair sits on the boundary 1/a + 1/b = 1 when possible
        let b = if i % 4 == 0 && &a / (&a - Q::one()) <= q(10, 1) { &a / (&a - Q::one()) } else { draw(&mut rng) };
        let (ia, ib) = (DeltaIndexSet::from(a.clone()).map_err(e)?, DeltaIndexSet::from(b.clone()).map_err(e)?);
        let expect = a.recip() + b.recip() >= Q::one();
        match conjugate_pair_exists(&ia, &ib) {
            Some((p, qq)) => {
                ensure(expect, format!("pair for ({a}, {b})"))?;
                ensure(p >= a && qq >= b && p.recip() + qq.recip() == Q::one() && p.is_positive(), format!("bad pair ({p}, {qq}) for ({a}, {b})"))?;
                some += 1;
            }
            None => {
                ensure(!expect, format!("no pair for ({a}, {b})"))?;
                none += 1;
            }
        }
    }
    Ok(format!("{some} pairs, {none} absent"))
}

fn pythagorean<R: Rng>(rng: &mut R) -> Vector {
    const T: [(i64, i64, i64); 5] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)];
    let (a, b, c) = T[rng.gen_range(0..T.len())];
    let (mut x, mut y) = (q(a, c), q(b, c));
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut x, &mut y);
    }
    if rng.gen_bool(0.5) {
        x = -x;
    }
    if rng.gen_bool(0.5) {
        y = -y;
    }
    Vector::coords(vec![x, y])
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = SearchConfig::default();
    let mut worst = 0.0f64;
    let spaces = [DeskSpace::lp(2, 1.0), DeskSpace::lp(2, f64::INFINITY), l2()];
    for i in 0..500 {
        let space = &spaces[i % 3];
        let x = if i % 3 == 2 { pythagorean(&mut rng) } else { random_unit_vector(space, &mut rng).map_err(e)? };
        let f = random_functional(space, &mut rng).map_err(e)?;
        let slice = SliceSpec::normalized(space, &f, absum::harness::sample::random_width(&mut rng)).map_err(e)?;
        let a = enumeration_sup(space, &x, &slice).map_err(|err| format!("instance {i}: {err}"))?;
        let b = grid_ascent_sup(space, &x, &slice, &cfg).map_err(e)?;
        let gap = (a.value.to_f64() - b.value.to_f64()).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-6, format!("instance {i} in {}: exact {} vs grid {}", space.label(), a.value, b.value))?;
    }
    Ok(format!("500 instances, largest gap {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("classifier ground truth", criterion_1),
        ("model witness soundness", criterion_2),
        ("sum Daugavet-point pipeline", criterion_3),
        ("transfer to components", criterion_4),
        ("certificate suite", criterion_5),
        ("Delta_k-point that is not a Delta-point", criterion_6),
        ("nested l_inf Delta-point", criterion_7),
        ("conjugate index arithmetic", criterion_8),
        ("brute oracle cross-check", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(note) => println!("criterion {}: PASS {name} ({note}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why}) [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
