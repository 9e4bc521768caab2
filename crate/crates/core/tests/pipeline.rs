//! Cross-module properties: generated expressions against the exact
//! oracle, and the CCD root finders against exact ground truth.

use std::collections::BTreeMap;

use intervalis::ccd::{ccd_oracle, multivariate_ccd, univariate_ccd, CcdQuery, QueryKind, Vec3};
use intervalis::expr_engine::{eval_interval, gen_expr, gen_inputs, ExprClass, VARIABLES};
use intervalis::float_kernel::decompose;
use intervalis::interval_core::{make_point, Strategy};
use intervalis::rational_oracle::{check_containment, Verdict};
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig, Strategy as _};

fn strategies() -> [Strategy; 2] {
    [Strategy::PredSucc, Strategy::multiplicative_default()]
}

fn coord() -> impl proptest::strategy::Strategy<Value = f64> {
    (-32i32..=32).prop_map(|k| k as f64 / 16.0)
}

fn vertices() -> impl proptest::strategy::Strategy<Value = [Vec3; 4]> {
    proptest::collection::vec(coord(), 12).prop_map(|c| std::array::from_fn(|i| [c[3 * i], c[3 * i + 1], c[3 * i + 2]]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_expressions_are_enclosed(
        seed in any::<u64>(),
        mixed in any::<bool>(),
        n_ops in 1usize..=12,
    ) {
        let class = if mixed { ExprClass::CompositeMixed } else { ExprClass::CompositeArith };
        let expr = gen_expr(seed, class, n_ops).unwrap();
        let domains: BTreeMap<String, (f64, f64)> =
            VARIABLES.iter().map(|v| (v.to_string(), (-100.0, 100.0))).collect();
        let Ok(inputs) = gen_inputs(seed, &expr, &domains, 4) else { return Ok(()) };
        for env in inputs {
            let points = env.iter().map(|(k, v)| (k.clone(), make_point(*v).unwrap())).collect();
            let exact = env.iter().map(|(k, v)| (k.clone(), decompose(*v).unwrap())).collect();
            for s in strategies() {
                let iv = eval_interval(&expr, &points, s).unwrap();
                prop_assert_eq!(check_containment(iv, &expr, &exact), Ok(Verdict::Contained), "{}", expr);
            }
        }
    }

    #[test]
    fn root_finders_never_miss(start in vertices(), end in vertices(), ee in any::<bool>()) {
        let kind = if ee { QueryKind::EdgeEdge } else { QueryKind::VertexFace };
        let q = CcdQuery::new(kind, start, end).unwrap();
        let Ok(truth) = ccd_oracle(&q) else { return Ok(()) };
        for s in strategies() {
            let multi = multivariate_ccd(&q, s, 1e-6);
            prop_assert!(multi.hit || !truth);
            // identically zero cubics are rejected by the oracle above
            let uni = univariate_ccd(&q, s, 1e-6).unwrap();
            prop_assert!(uni.hit || !truth);
            prop_assert_eq!(multivariate_ccd(&q, s, 1e-6), multi);
        }
    }
}
