//! Reference Bethe-root tables for the two preset parameter sets at `N = 2`, as printed
//! (four decimals).

use num_complex::Complex64;

use crate::bethe::TQVariant;
use crate::model::{BoundaryFamily, ModelParams};

type C = Complex64;

const fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// One printed row: sector, roots and the printed Markov eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub m: usize,
    pub lambda: Vec<C>,
    pub mu: Vec<C>,
    pub e_l: f64,
    /// Printed degeneracy, where the table has that column.
    pub degeneracy: Option<usize>,
    /// Known misprint in the printed `E_L`, with the value the roots actually give.
    pub misprint: Option<f64>,
}

/// A reference table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub id: &'static str,
    pub variant: TQVariant,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn family(&self) -> BoundaryFamily {
        self.variant.family()
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::preset(self.family(), 2)
    }
}

fn row(m: usize, lambda: &[C], mu: &[C], e_l: f64, degeneracy: Option<usize>) -> TableRow {
    TableRow {
        m,
        lambda: lambda.to_vec(),
        mu: mu.to_vec(),
        e_l,
        degeneracy,
        misprint: None,
    }
}

pub const TABLE_IDS: [&str; 5] = [
    "table-4.1",
    "table-4.2",
    "table-5.1",
    "table-5.2",
    "table-5.3",
];

/// Looks a table up by id (`table-4.1`, …).
pub fn table(id: &str) -> Option<Table> {
    let rows = match id {
        "table-4.1" => vec![
            row(
                1,
                &[c(1.8425, 0.7780), c(0.4229, 0.0)],
                &[c(3.6309, 1.6782)],
                -61.4000,
                Some(1),
            ),
            row(0, &[c(-0.1633, -1.9933)], &[], -58.0897, Some(2)),
            row(
                2,
                &[c(0.1467, -0.5508), c(0.3181, 0.0), c(1.8063, -6.7815)],
                &[c(1.0928, 0.0), c(0.3793, 0.0)],
                -56.4000,
                Some(1),
            ),
            row(0, &[c(0.8561, 0.0)], &[], -39.3654, Some(2)),
            row(0, &[c(0.9249, 0.0)], &[], -20.3449, Some(2)),
            row(
                1,
                &[c(0.8843, 0.0), c(0.9215, 0.0)],
                &[c(-0.1784, 0.0)],
                0.0,
                Some(1),
            ),
        ],
        "table-4.2" => vec![
            row(1, &[c(1.6, 1.2)], &[], -61.4000, None),
            row(0, &[], &[], -56.4000, None),
        ],
        "table-5.1" => vec![
            row(
                0,
                &[c(1.3364, -0.1187), c(0.7605, 1.1053)],
                &[c(3.8401, 0.0), c(0.8983, -1.5598)],
                -5.5301,
                None,
            ),
            row(
                1,
                &[c(1.3354, 0.1293)],
                &[c(0.2671, 0.0), c(3.0386, 0.0)],
                -4.9531,
                None,
            ),
            row(
                0,
                &[c(1.2557, 0.0), c(0.7742, 0.0)],
                &[c(1.2367, 0.0), c(6.5979, 0.0)],
                -3.6350,
                None,
            ),
            row(
                1,
                &[c(1.3052, -0.3104)],
                &[c(0.2949, 0.0), c(1.7620, -0.3678)],
                -3.3771,
                None,
            ),
            row(
                0,
                &[c(0.9287, 0.4576), c(1.5595, 0.7685)],
                &[c(5.1709, 0.0), c(1.4374, -1.0835)],
                -2.0590,
                None,
            ),
            row(
                1,
                &[c(1.1841, 0.6309)],
                &[c(3.5520, 0.0), c(0.2464, 0.0)],
                -1.4819,
                None,
            ),
            row(
                0,
                &[c(0.0, 0.0), c(0.0, 0.0)],
                &[c(0.0, 0.0), c(0.0, 0.0)],
                0.0,
                None,
            ),
            row(1, &[c(0.0, 0.0)], &[c(0.0, 0.0), c(0.5377, 0.0)], 0.0, None),
            row(2, &[], &[c(0.1207, 0.0), c(0.6181, 0.0)], 0.0, None),
        ],
        "table-5.2" => vec![
            row(0, &[], &[], 0.0, None),
            row(1, &[], &[c(0.5377, 0.0)], 0.0, None),
            row(2, &[], &[c(0.1207, 0.0), c(0.6181, 0.0)], 0.0, None),
        ],
        "table-5.3" => {
            let mut rows = vec![
                row(0, &[c(1.1572, -0.6788)], &[], -5.5301, None),
                row(
                    1,
                    &[c(3.3759, 0.0), c(1.1572, -0.6788)],
                    &[c(2.8732, 0.0)],
                    -4.9531,
                    None,
                ),
                row(
                    1,
                    &[c(2.3221, 0.0), c(1.1572, -0.6788)],
                    &[c(1.7395, 0.4628)],
                    -3.3771,
                    None,
                ),
                row(0, &[c(3.3759, 0.0)], &[], -3.6390, None),
                row(0, &[c(2.3221, 0.0)], &[], -2.0590, None),
                row(
                    1,
                    &[c(3.3759, 0.0), c(2.3221, 0.0)],
                    &[c(3.6054, 0.0)],
                    -1.4819,
                    None,
                ),
            ];
            // the same eigenvalue is printed as −3.6350 in the first-type table of this model
            rows[3].misprint = Some(-3.6350);
            rows
        }
        _ => return None,
    };
    let variant = match id {
        "table-4.1" => TQVariant::A1,
        "table-4.2" => TQVariant::A3,
        "table-5.1" => TQVariant::B1,
        "table-5.2" => TQVariant::B2,
        _ => TQVariant::B3,
    };
    Some(Table {
        id: TABLE_IDS.iter().find(|t| **t == id).copied()?,
        variant,
        rows,
    })
}

/// Printed Markov spectrum (value, degeneracy) for a family's preset at `N = 2`.
pub fn reference_spectrum(family: BoundaryFamily) -> Vec<(f64, usize)> {
    match family {
        BoundaryFamily::A => table("table-4.1")
            .expect("known id")
            .rows
            .iter()
            .map(|r| (r.e_l, r.degeneracy.unwrap_or(1)))
            .collect(),
        BoundaryFamily::B => {
            let mut v: Vec<(f64, usize)> = table("table-5.1").expect("known id").rows[..6]
                .iter()
                .map(|r| (r.e_l, 1))
                .collect();
            v.push((0.0, 3));
            v
        }
    }
}

/// Table seeds for a variant and sector, when `params` is that variant's preset at `N = 2`.
pub fn seeds_for(variant: TQVariant, m: usize, params: &ModelParams) -> Vec<(Vec<C>, Vec<C>)> {
    if params != &ModelParams::preset(variant.family(), 2) {
        return Vec::new();
    }
    let id = match variant {
        TQVariant::A1 => "table-4.1",
        TQVariant::A3 => "table-4.2",
        TQVariant::B1 => "table-5.1",
        TQVariant::B2 => "table-5.2",
        TQVariant::B3 => "table-5.3",
        TQVariant::A2 => return Vec::new(),
    };
    table(id)
        .expect("known id")
        .rows
        .into_iter()
        .filter(|r| r.m == m)
        .map(|r| (r.lambda, r.mu))
        .collect()
}

/// Whether computed roots reproduce a printed row: equal sector, and each root list equal as a
/// multiset within `tol` up to the reflections `λ ↔ q/λ`, `μ ↔ q²/μ` (printed values on the
/// reflection circle can fall on either side of any canonical tie-break).
pub fn row_matches(row: &TableRow, m: usize, lambda: &[C], mu: &[C], q: f64, tol: f64) -> bool {
    m == row.m
        && reflected_close(lambda, &row.lambda, q, tol)
        && reflected_close(mu, &row.mu, q * q, tol)
}

fn reflected_close(found: &[C], printed: &[C], pair: f64, tol: f64) -> bool {
    if found.len() != printed.len() {
        return false;
    }
    (0..1usize << printed.len()).any(|mask| {
        let candidate: Vec<C> = printed
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if mask >> i & 1 == 1 && r.norm() > 0.0 {
                    pair / r
                } else {
                    r
                }
            })
            .collect();
        multiset_close(found, &candidate, tol)
    })
}

fn multiset_close(a: &[C], b: &[C], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (x - b[i]).norm().total_cmp(&(x - b[j]).norm()));
        match best {
            Some(j) if (x - b[j]).norm() < tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ids_resolve_and_unknown_ids_do_not() {
        for id in TABLE_IDS {
            let t = table(id).unwrap();
            assert_eq!(t.id, id);
            assert!(!t.rows.is_empty());
        }
        assert!(table("table-9.9").is_none());
    }

    #[test]
    fn reference_spectra_have_full_dimension() {
        for f in BoundaryFamily::ALL {
            assert_eq!(reference_spectrum(f).iter().map(|r| r.1).sum::<usize>(), 9);
        }
    }

    #[test]
    fn row_matching_accepts_reflected_roots() {
        let t = table("table-5.3").unwrap();
        let row = &t.rows[1];
        let q = 1.8;
        let lambda = [c(q / 3.3759, 0.0), c(1.1572, -0.6788)];
        assert!(row_matches(row, 1, &lambda, &[c(2.8732, 0.0)], q, 1e-3));
        assert!(row_matches(
            row,
            1,
            &lambda,
            &[c(q * q / 2.8732, 0.0)],
            q,
            1e-3
        ));
        assert!(!row_matches(row, 0, &lambda, &[c(2.8732, 0.0)], q, 1e-3));
        assert!(!row_matches(row, 1, &lambda, &[c(2.9, 0.0)], q, 1e-3));
    }

    #[test]
    fn seeds_only_for_the_presets() {
        let p = ModelParams::paper_a(2);
        assert_eq!(seeds_for(TQVariant::A1, 0, &p).len(), 3);
        assert!(seeds_for(TQVariant::A1, 0, &p.with_q(3.0).unwrap()).is_empty());
        assert!(seeds_for(TQVariant::A2, 0, &p).is_empty());
    }
}
