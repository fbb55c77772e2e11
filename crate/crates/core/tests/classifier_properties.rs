use mastite_core::{
    classify_quartet, classify_teat, Celsius, ClassificationMode, HealthStatus, TeatQuartet,
    ThresholdTable,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const MODES: [ClassificationMode; 2] = [
    ClassificationMode::PaperFaithful,
    ClassificationMode::WorstTeat,
];

/// Independent per-teat rule, written out as literal comparisons.
fn oracle_teat(t: f64) -> u8 {
    if t > 36.5 {
        3
    } else if t > 34.5 {
        2
    } else if t > 33.0 {
        1
    } else {
        0
    }
}

/// Max severity over teats that classify at all; 0 only if none do.
fn oracle_worst(v: [f64; 4]) -> u8 {
    v.iter()
        .map(|t| oracle_teat(*t))
        .filter(|s| *s != 0)
        .max()
        .unwrap_or(0)
}

fn quartet(v: [f64; 4]) -> TeatQuartet {
    TeatQuartet::from_values(v).unwrap()
}

fn grid() -> Vec<f64> {
    // 31.0, 31.5, .., 43.0 computed from integers so every point is exact.
    (62..=86).map(|h| h as f64 / 2.0).collect()
}

#[test]
fn worst_teat_matches_oracle_on_full_grid() {
    let th = ThresholdTable::default();
    let g = grid();
    assert_eq!(g.len(), 25);
    let mut checked = 0u64;
    for &a in &g {
        for &b in &g {
            for &c in &g {
                for &d in &g {
                    let v = [a, b, c, d];
                    let q = quartet(v);
                    let worst = classify_quartet(&q, ClassificationMode::WorstTeat, &th);
                    assert_eq!(worst.severity(), oracle_worst(v), "{v:?}");
                    // totality for the other mode on the same grid
                    let _ = classify_quartet(&q, ClassificationMode::PaperFaithful, &th);
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 25u64.pow(4));
}

#[test]
fn worst_teat_matches_oracle_on_random_quartets() {
    let th = ThresholdTable::default();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x6d61_7374);
    for _ in 0..20_000 {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(31.0..43.0));
        let got = classify_quartet(&quartet(v), ClassificationMode::WorstTeat, &th);
        assert_eq!(got.severity(), oracle_worst(v), "{v:?}");
    }
}

fn temp() -> impl Strategy<Value = f64> {
    prop_oneof![
        31.0f64..43.0,
        // land on the breakpoints often
        prop::sample::select(vec![32.0, 33.0, 34.5, 36.5, 42.9]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn permutation_invariant(v in prop::array::uniform4(temp()), perm in Just([0usize, 1, 2, 3]).prop_shuffle()) {
        let th = ThresholdTable::default();
        let shuffled = [v[perm[0]], v[perm[1]], v[perm[2]], v[perm[3]]];
        for mode in MODES {
            prop_assert_eq!(
                classify_quartet(&quartet(v), mode, &th),
                classify_quartet(&quartet(shuffled), mode, &th)
            );
        }
    }

    #[test]
    fn teat_monotone_above_lower_bound(a in 33.0f64..60.0, b in 33.0f64..60.0) {
        prop_assume!(a > 33.0 && b > 33.0);
        let th = ThresholdTable::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s_lo = classify_teat(Celsius::new(lo).unwrap(), &th);
        let s_hi = classify_teat(Celsius::new(hi).unwrap(), &th);
        prop_assert!(s_lo.severity() <= s_hi.severity());
        prop_assert_ne!(s_lo, HealthStatus::Indeterminate);
    }

    #[test]
    fn teat_total_on_any_finite(t in prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL) {
        let th = ThresholdTable::default();
        let s = classify_teat(Celsius::new(t).unwrap(), &th);
        prop_assert!(HealthStatus::ALL.contains(&s));
    }

    #[test]
    fn modes_agree_when_teats_agree(v in prop::array::uniform4(temp())) {
        let th = ThresholdTable::default();
        let per: Vec<_> = v.iter().map(|t| classify_teat(Celsius::new(*t).unwrap(), &th)).collect();
        if per.iter().all(|s| *s == per[0]) && per[0] != HealthStatus::Indeterminate {
            for mode in MODES {
                prop_assert_eq!(classify_quartet(&quartet(v), mode, &th), per[0]);
            }
        }
    }

    #[test]
    fn paper_faithful_never_more_severe(v in prop::array::uniform4(temp())) {
        let th = ThresholdTable::default();
        let q = quartet(v);
        let pf = classify_quartet(&q, ClassificationMode::PaperFaithful, &th);
        let wt = classify_quartet(&q, ClassificationMode::WorstTeat, &th);
        prop_assert!(pf <= wt);
    }

    #[test]
    fn pure(v in prop::array::uniform4(temp())) {
        let th = ThresholdTable::default();
        let q = quartet(v);
        for mode in MODES {
            prop_assert_eq!(classify_quartet(&q, mode, &th), classify_quartet(&q, mode, &th));
        }
    }
}
