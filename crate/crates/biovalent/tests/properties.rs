//! Property tests over the numeric core: Leontief/Neumann equivalence,
//! attribution conservation, share normalization, weighting linearity and
//! formatting round-trips on randomized inputs.

#![allow(clippy::needless_range_loop)]

use biovalent::characterization::{allocate_to_countries, driver_share, RegionConcordance};
use biovalent::footprint::{biodiversity_equivalent, format_bde, parse_bde};
use biovalent::index::RegionSectorIndex;
use biovalent::ledger::harmonize_price;
use biovalent::linalg::Matrix;
use biovalent::mrio::{leontief_inverse, source_attribution, EconomicCore};
use biovalent::types::ByEcosystem;
use proptest::prelude::*;

const N_REGIONS: usize = 3;
const N_SECTORS: usize = 2;
const N: usize = N_REGIONS * N_SECTORS;

/// A random productive economy: coefficient columns scaled below 0.9, gross
/// output derived from a random total final demand so the accounting
/// identity holds by construction.
#[derive(Debug, Clone)]
struct RandomEconomy {
    core: EconomicCore<f64>,
    a: Matrix<f64>,
    stressor: Vec<f64>,
}

fn economy_strategy() -> impl Strategy<Value = RandomEconomy> {
    (
        proptest::collection::vec(0.0f64..1.0, N * N),
        proptest::collection::vec(0.05f64..0.85, N),
        proptest::collection::vec(1.0f64..100.0, N),
        proptest::collection::vec(0.01f64..1.0, N * N_REGIONS),
        proptest::collection::vec(0.0f64..50.0, N),
    )
        .prop_map(|(raw_a, col_sums, y_total, y_weights, stressor)| {
            let mut a = Matrix::zeros(N, N);
            for m in 0..N {
                let col_total: f64 = (0..N).map(|n| raw_a[n * N + m]).sum();
                for n in 0..N {
                    let v = if col_total > 0.0 {
                        raw_a[n * N + m] / col_total * col_sums[m]
                    } else {
                        0.0
                    };
                    a.set(n, m, v);
                }
            }
            let l = leontief_inverse(&a).expect("columns scaled below 1");
            // x = L * y_total sustains the final demand
            let mut x = vec![0.0; N];
            for n in 0..N {
                for m in 0..N {
                    x[n] += l.get(n, m) * y_total[m];
                }
            }
            let mut z = Matrix::zeros(N, N);
            for n in 0..N {
                for m in 0..N {
                    z.set(n, m, a.get(n, m) * x[m]);
                }
            }
            let mut y = Matrix::zeros(N, N_REGIONS);
            for n in 0..N {
                let weight_total: f64 =
                    (0..N_REGIONS).map(|j| y_weights[n * N_REGIONS + j]).sum();
                for j in 0..N_REGIONS {
                    y.set(n, j, y_total[n] * y_weights[n * N_REGIONS + j] / weight_total);
                }
            }
            let index =
                RegionSectorIndex::new(["R0", "R1", "R2"], ["S0", "S1"]).unwrap();
            let core = EconomicCore::with_output(index, z, y, x).expect("consistent core");
            RandomEconomy { core, a, stressor }
        })
}

fn truncated_neumann(a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.n_rows();
    let mut total = Matrix::<f64>::identity(n);
    let mut term = Matrix::<f64>::identity(n);
    loop {
        term = term.matmul(a).unwrap();
        let increment = term.max_abs();
        for r in 0..n {
            for c in 0..n {
                total.set(r, c, total.get(r, c) + term.get(r, c));
            }
        }
        if increment < 1e-10 {
            return total;
        }
    }
}

proptest! {
    #[test]
    fn leontief_matches_truncated_neumann(economy in economy_strategy()) {
        let l = leontief_inverse(&economy.a).unwrap();
        let series = truncated_neumann(&economy.a);
        prop_assert!(l.max_abs_diff(&series) <= 1e-8);
    }

    #[test]
    fn attribution_conserves_stressor_totals(economy in economy_strategy()) {
        let core = &economy.core;
        let l = core.total_requirements().unwrap();
        let tensor = source_attribution(core, &l, &economy.stressor).unwrap();

        // per column: the tensor total equals the embodied stressor of that
        // column's final demand, evaluated independently
        let index = core.index();
        for column in 0..index.len() {
            let j = index.region_of(column);
            let k = index.sector_of(column);
            let mut embodied = 0.0;
            for src in 0..index.len() {
                if economy.stressor[src] == 0.0 {
                    continue;
                }
                let s = economy.stressor[src] / core.output()[src];
                for r in 0..index.n_regions() {
                    let mid = index.position_of(r, k);
                    embodied += s * l.get(src, mid) * core.final_demand().get(mid, j);
                }
            }
            let total = tensor.column_total(column);
            prop_assert!(
                (total - embodied).abs() <= 1e-9 * embodied.abs().max(1.0),
                "column {column}: {total} vs {embodied}"
            );
        }

        // globally: final demand absorbs all net output, so the attribution
        // total recovers the satellite total
        let stressor_total: f64 = economy.stressor.iter().sum();
        prop_assert!(
            (tensor.total() - stressor_total).abs() <= 1e-9 * stressor_total.max(1.0)
        );
    }

    #[test]
    fn attribution_scales_linearly(economy in economy_strategy()) {
        let core = &economy.core;
        let l = core.total_requirements().unwrap();
        let base = source_attribution(core, &l, &economy.stressor).unwrap();
        let doubled_stressor: Vec<f64> = economy.stressor.iter().map(|v| 2.0 * v).collect();
        let doubled = source_attribution(core, &l, &doubled_stressor).unwrap();
        for region in 0..core.index().n_regions() {
            for column in 0..core.index().len() {
                prop_assert_eq!(
                    doubled.get(region, column),
                    2.0 * base.get(region, column)
                );
            }
        }
        // the per-euro intensities scale the same way
        let base_intensity =
            biovalent::mrio::footprint_intensity(core, &l, &economy.stressor).unwrap();
        let doubled_intensity =
            biovalent::mrio::footprint_intensity(core, &l, &doubled_stressor).unwrap();
        for column in 0..core.index().len() {
            prop_assert_eq!(
                doubled_intensity.get(column),
                2.0 * base_intensity.get(column)
            );
        }
    }

    #[test]
    fn shares_sum_to_one_and_allocation_preserves_mass(economy in economy_strategy()) {
        let core = &economy.core;
        let l = core.total_requirements().unwrap();
        let tensor = source_attribution(core, &l, &economy.stressor).unwrap();
        let share = driver_share(&tensor);
        for column in 0..core.index().len() {
            let column_sum = share.values.col_sum(column);
            if share.degenerate_columns[column] {
                prop_assert_eq!(column_sum, 0.0);
            } else {
                prop_assert!((column_sum - 1.0).abs() <= 1e-12);
            }
        }

        let concordance = RegionConcordance::new(vec![
            ("R0".to_string(), "AAA".to_string()),
            ("R1".to_string(), "BBB".to_string()),
            ("R1".to_string(), "CCC".to_string()),
            ("R2".to_string(), "DDD".to_string()),
            ("R2".to_string(), "EEE".to_string()),
            ("R2".to_string(), "FFF".to_string()),
        ])
        .unwrap();
        let allocation = allocate_to_countries(&share, &concordance).unwrap();
        for column in 0..core.index().len() {
            let before = share.values.col_sum(column);
            let after = allocation.values.col_sum(column);
            prop_assert!((before - after).abs() <= 1e-12 * before.abs().max(1.0));
        }
    }

    #[test]
    fn permuting_regions_permutes_attribution_consistently(economy in economy_strategy()) {
        let core = &economy.core;
        let l = core.total_requirements().unwrap();
        let base = source_attribution(core, &l, &economy.stressor).unwrap();

        // region order R2, R0, R1
        let perm = [2usize, 0, 1];
        let index = core.index();
        let permuted_index = RegionSectorIndex::new(
            perm.iter().map(|&r| index.regions()[r].clone()).collect::<Vec<_>>(),
            index.sectors().to_vec(),
        )
        .unwrap();
        let map_pos = |p: usize| -> usize {
            // position in the permuted flattened index of the original p
            let r_old = index.region_of(p);
            let s = index.sector_of(p);
            let r_new = perm.iter().position(|&x| x == r_old).unwrap();
            permuted_index.position_of(r_new, s)
        };
        let n = index.len();
        let mut z = Matrix::zeros(n, n);
        let mut y = Matrix::zeros(n, index.n_regions());
        let mut x = vec![0.0; n];
        let mut f = vec![0.0; n];
        for p in 0..n {
            let pp = map_pos(p);
            x[pp] = core.output()[p];
            f[pp] = economy.stressor[p];
            for q in 0..n {
                z.set(pp, map_pos(q), core.flows().get(p, q));
            }
            for j in 0..index.n_regions() {
                let jj = perm.iter().position(|&x| x == j).unwrap();
                y.set(pp, jj, core.final_demand().get(p, j));
            }
        }
        let permuted_core =
            EconomicCore::with_output(permuted_index.clone(), z, y, x).unwrap();
        let l2 = permuted_core.total_requirements().unwrap();
        let permuted = source_attribution(&permuted_core, &l2, &f).unwrap();

        for i in 0..index.n_regions() {
            let i_new = perm.iter().position(|&x| x == i).unwrap();
            for column in 0..n {
                let column_new = map_pos(column);
                let a = base.get(i, column);
                let b = permuted.get(i_new, column_new);
                prop_assert!(
                    (a - b).abs() <= 1e-9 * a.abs().max(1e-12),
                    "cell ({i},{column}): {a} vs {b}"
                );
            }
        }
        // column sums unchanged under permutation
        for column in 0..n {
            let a = base.column_total(column);
            let b = permuted.column_total(map_pos(column));
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn bde_weighting_is_linear(
        t in 0.0f64..1.0,
        f in 0.0f64..1.0,
        m in 0.0f64..1.0,
        alpha in 0.0f64..10.0,
    ) {
        let base = ByEcosystem::new(t, f, m);
        let scaled = ByEcosystem::new(alpha * t, alpha * f, alpha * m);
        let direct = biodiversity_equivalent(&scaled);
        let reference = alpha * biodiversity_equivalent(&base);
        prop_assert!((direct - reference).abs() <= 1e-12 * reference.abs().max(1e-12));
    }

    #[test]
    fn bde_weighting_commutes_with_summation(
        parts in proptest::collection::vec((0.0f64..1e-6, 0.0f64..1e-6, 0.0f64..1e-6), 1..20)
    ) {
        let mut total = ByEcosystem::new(0.0, 0.0, 0.0);
        let mut sum_of_values = 0.0;
        for (t, f, m) in &parts {
            let part = ByEcosystem::new(*t, *f, *m);
            total.add_assign(&part);
            sum_of_values += biodiversity_equivalent(&part);
        }
        let value_of_total = biodiversity_equivalent(&total);
        prop_assert!(
            (value_of_total - sum_of_values).abs()
                <= 1e-12 * sum_of_values.abs().max(1e-30)
        );
    }

    #[test]
    fn format_bde_prefix_rule_and_round_trip(exponent in -18.0f64..-6.0, mantissa in 1.0f64..9.9999) {
        let value = mantissa * 10f64.powf(exponent);
        let text = format_bde(value);
        let parsed = parse_bde(&text).unwrap();
        if (1e-15..1e-6).contains(&value) {
            // a prefix applies; the displayed mantissa sits in [1, 1000)
            prop_assert!(
                text.ends_with("nBDe") || text.ends_with("pBDe") || text.ends_with("fBDe"),
                "{text}"
            );
            let shown: f64 = text
                .split_whitespace()
                .next()
                .unwrap()
                .parse()
                .unwrap();
            prop_assert!((1.0..1000.0).contains(&shown.abs()), "{text}");
            let scale = match text.chars().rev().nth(3).unwrap() {
                'n' => 1e-9,
                'p' => 1e-12,
                'f' => 1e-15,
                other => panic!("unexpected prefix {other}"),
            };
            prop_assert!((parsed - value).abs() <= 0.005 * scale);
        } else {
            prop_assert!(text.contains('e'), "{text}");
            // scientific fallback keeps three significant digits
            prop_assert!((parsed - value).abs() <= 0.005 * 10f64.powf(exponent) * 10.0);
        }
    }

    #[test]
    fn harmonization_matches_closed_form(
        amount in -1e6f64..1e6,
        inflation in -0.2f64..0.5,
        bpcf in -0.7f64..0.7,
    ) {
        let closed = amount * (1.0 - inflation) * (1.0 - bpcf);
        prop_assert_eq!(harmonize_price(amount, inflation, bpcf), closed);
    }
}
