//! Extreme-value search on a closed interval by iterative grid
//! refinement. Enclosures are certified only when the caller supplies
//! a Lipschitz bound; without one the results are labeled estimates,
//! because sampling alone cannot bound a continuous function.

use num_traits::Signed;

use crate::approx::MidRad;
use crate::calculus::{CalculusError, RealFunction};
use crate::fluxion::Budget;
use crate::rational::Rational;
use crate::topology::IntervalSet;

/// Value enclosures and argument estimates for both extremes.
#[derive(Clone, Debug)]
pub struct ExtremeValues {
    pub min: MidRad,
    pub max: MidRad,
    pub min_args: Vec<Rational>,
    pub max_args: Vec<Rational>,
    /// True when a Lipschitz bound certified the enclosures.
    pub certified: bool,
}

/// Cap on argument ties reported back.
const MAX_ARGS: usize = 8;

pub fn extreme_values(
    f: &RealFunction,
    a: &Rational,
    b: &Rational,
    grid: u32,
    rounds: u32,
    lipschitz: Option<&Rational>,
) -> Result<ExtremeValues, CalculusError> {
    if a > b {
        return Err(CalculusError::DomainViolation {
            detail: format!("need a <= b, got a = {a}, b = {b}"),
        });
    }
    if grid == 0 || rounds == 0 {
        return Err(CalculusError::DomainViolation {
            detail: "grid and rounds must be positive".to_string(),
        });
    }
    if !IntervalSet::closed(a.clone(), b.clone()).is_subset_of(f.domain()) {
        return Err(CalculusError::DomainViolation {
            detail: format!("[{a}, {b}] is not contained in the domain"),
        });
    }
    let bits = Budget::default().bits;
    let eval = |t: &Rational| -> Result<MidRad, CalculusError> {
        f.value_enclosure(t, bits)
            .ok_or_else(|| CalculusError::DomainViolation {
                detail: format!("the function has no value at {t}"),
            })
    };
    if a == b {
        let v = eval(a)?;
        return Ok(ExtremeValues {
            min: v.clone(),
            max: v,
            min_args: vec![a.clone()],
            max_args: vec![a.clone()],
            certified: true,
        });
    }
    let max_side = search_extreme(f, a, b, grid, rounds, lipschitz, bits, false)?;
    let min_side = search_extreme(f, a, b, grid, rounds, lipschitz, bits, true)?;
    Ok(ExtremeValues {
        min: min_side.0,
        max: max_side.0,
        min_args: min_side.1,
        max_args: max_side.1,
        certified: lipschitz.is_some(),
    })
}

/// Grid search for the maximum (of f, or of -f when `negate` is set,
/// which yields the minimum with the enclosure flipped back).
#[allow(clippy::too_many_arguments)]
fn search_extreme(
    f: &RealFunction,
    a: &Rational,
    b: &Rational,
    grid: u32,
    rounds: u32,
    lipschitz: Option<&Rational>,
    bits: u32,
    negate: bool,
) -> Result<(MidRad, Vec<Rational>), CalculusError> {
    let eval = |t: &Rational| -> Result<MidRad, CalculusError> {
        let v = f
            .value_enclosure(t, bits)
            .ok_or_else(|| CalculusError::DomainViolation {
                detail: format!("the function has no value at {t}"),
            })?;
        Ok(if negate { v.neg() } else { v })
    };

    let mut cells: Vec<(Rational, Rational)> = split_cell(a, b, grid);
    let mut best: Option<MidRad> = None;
    let mut best_args: Vec<Rational> = Vec::new();
    let mut final_potential: Option<Rational> = None;

    for round in 0..rounds {
        // Score every cell by its best endpoint sample.
        let mut scored: Vec<(Rational, Rational, MidRad)> = Vec::new();
        for (lo, hi) in &cells {
            let mut cell_best: Option<MidRad> = None;
            for t in cell_points(lo, hi, grid) {
                let v = eval(&t)?;
                if better(&v, &cell_best) {
                    cell_best = Some(v.clone());
                }
                match &best {
                    Some(cur) if ties(&v, cur) => record_arg(&mut best_args, t),
                    Some(cur) if v.mid > cur.mid => {
                        best = Some(v.clone());
                        best_args.clear();
                        record_arg(&mut best_args, t);
                    }
                    Some(_) => {}
                    None => {
                        best = Some(v.clone());
                        record_arg(&mut best_args, t);
                    }
                }
            }
            scored.push((lo.clone(), hi.clone(), cell_best.unwrap()));
        }
        let best_now = best.clone().unwrap();

        // A cell stays alive if it could still contain the maximum:
        // with a Lipschitz bound that is a certified test and no cell
        // may be dropped; without one the top scorers are kept
        // heuristically.
        let width = &scored[0].1 - &scored[0].0;
        let survivors: Vec<&(Rational, Rational, MidRad)> = match lipschitz {
            Some(l) => scored
                .iter()
                .filter(|(_, _, v)| {
                    v.upper() + l * &width / Rational::from_integer(2.into())
                        >= best_now.lower()
                })
                .collect(),
            None => {
                let mut ranked: Vec<&(Rational, Rational, MidRad)> = scored.iter().collect();
                ranked.sort_by(|x, y| y.2.mid.cmp(&x.2.mid));
                ranked.into_iter().take(4).collect()
            }
        };

        if let Some(l) = lipschitz {
            final_potential = survivors
                .iter()
                .map(|(_, _, v)| v.upper() + l * &width / Rational::from_integer(2.into()))
                .max();
        }
        if round + 1 < rounds {
            cells = survivors
                .iter()
                .flat_map(|(lo, hi, _)| split_cell(lo, hi, grid))
                .collect();
        }
    }

    let best = best.unwrap();
    let enclosure = match final_potential {
        Some(ub) => MidRad::from_bounds(best.lower(), ub.max(best.upper())),
        None => best,
    };
    let enclosure = if negate {
        MidRad::from_bounds(-enclosure.upper(), -enclosure.lower())
    } else {
        enclosure
    };
    best_args.sort();
    Ok((enclosure, best_args))
}

fn split_cell(lo: &Rational, hi: &Rational, grid: u32) -> Vec<(Rational, Rational)> {
    let step = (hi - lo) / Rational::from_integer(grid.into());
    (0..grid)
        .map(|i| {
            let l = lo + &step * Rational::from_integer(i.into());
            let h = if i + 1 == grid {
                hi.clone()
            } else {
                lo + &step * Rational::from_integer((i + 1).into())
            };
            (l, h)
        })
        .collect()
}

fn cell_points(lo: &Rational, hi: &Rational, grid: u32) -> Vec<Rational> {
    let step = (hi - lo) / Rational::from_integer(grid.into());
    let mut pts: Vec<Rational> = (0..=grid)
        .map(|i| lo + &step * Rational::from_integer(i.into()))
        .collect();
    if let Some(last) = pts.last_mut() {
        *last = hi.clone();
    }
    pts
}

fn better(candidate: &MidRad, current: &Option<MidRad>) -> bool {
    match current {
        Some(c) => candidate.mid > c.mid,
        None => true,
    }
}

fn ties(candidate: &MidRad, current: &MidRad) -> bool {
    (&candidate.mid - &current.mid).abs() <= &candidate.rad + &current.rad
}

fn record_arg(args: &mut Vec<Rational>, t: Rational) {
    if args.len() < MAX_ARGS && !args.contains(&t) {
        args.push(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::realfn::FnExpr;
    use crate::rational::{q, qr};
    use num_traits::Zero;

    fn contains(v: &MidRad, t: &Rational) -> bool {
        (&v.mid - t).abs() <= v.rad
    }

    #[test]
    fn parabola_extremes_on_a_mixed_interval() {
        let f = RealFunction::poly(&[q(0), q(0), q(1)]);
        let lipschitz = q(4);
        let r = extreme_values(&f, &q(-1), &q(2), 6, 3, Some(&lipschitz)).unwrap();
        assert!(contains(&r.max, &q(4)));
        assert!(contains(&r.min, &q(0)));
        assert_eq!(r.max_args, vec![q(2)]);
        assert_eq!(r.min_args, vec![q(0)]);
        assert!(r.certified);
        // The sampled maximum is exact, so the enclosure touches it
        // from below.
        assert_eq!(r.max.lower(), q(4));
        assert_eq!(r.min.upper(), q(0));
    }

    #[test]
    fn double_well_reports_tied_argument_pairs() {
        // t^3 - 3t on [-2, 2]: maximum 2 at both -1 and 2, minimum -2
        // at both -2 and 1; the derivative is bounded by 9 there.
        let f = RealFunction::poly(&[q(0), q(-3), q(0), q(1)]);
        let lipschitz = q(9);
        let r = extreme_values(&f, &q(-2), &q(2), 8, 3, Some(&lipschitz)).unwrap();
        assert!(contains(&r.max, &q(2)));
        assert!(contains(&r.min, &q(-2)));
        assert_eq!(r.max_args, vec![q(-1), q(2)]);
        assert_eq!(r.min_args, vec![q(-2), q(1)]);
        assert!(r.certified);
    }

    #[test]
    fn constant_map_degenerates_to_its_value() {
        let f = RealFunction::constant(q(5));
        let r = extreme_values(&f, &q(1), &q(4), 3, 2, None).unwrap();
        assert!(r.max.is_exact() && r.max.mid == q(5));
        assert!(r.min.is_exact() && r.min.mid == q(5));
        assert!(!r.certified);
        assert!(!r.max_args.is_empty());
        assert_eq!(r.min_args, r.max_args);
    }

    #[test]
    fn single_point_interval_evaluates_once() {
        let f = RealFunction::poly(&[q(0), q(0), q(1)]);
        let r = extreme_values(&f, &qr(3, 2), &qr(3, 2), 5, 2, None).unwrap();
        assert!(r.max.is_exact() && r.max.mid == qr(9, 4));
        assert!(r.min.is_exact() && r.min.mid == qr(9, 4));
        assert_eq!(r.max_args, vec![qr(3, 2)]);
        assert!(r.certified);
    }

    #[test]
    fn uncertified_search_still_locates_the_parabola_extremes() {
        let f = RealFunction::poly(&[q(0), q(0), q(1)]);
        let r = extreme_values(&f, &q(-1), &q(2), 6, 2, None).unwrap();
        assert!(!r.certified);
        assert_eq!(r.max.mid, q(4));
        assert!(r.min.mid.is_zero());
    }

    #[test]
    fn certification_widens_enclosures_over_raw_samples() {
        let f = RealFunction::poly(&[q(0), q(-3), q(0), q(1)]);
        let lip = q(9);
        let certified = extreme_values(&f, &q(-2), &q(2), 8, 2, Some(&lip)).unwrap();
        let raw = extreme_values(&f, &q(-2), &q(2), 8, 2, None).unwrap();
        assert!(certified.max.rad >= raw.max.rad);
        assert!(certified.max.upper() >= q(2));
        assert!(raw.max.mid <= q(2));
    }

    #[test]
    fn rejects_bad_requests() {
        let f = RealFunction::poly(&[q(0), q(0), q(1)]);
        assert!(matches!(
            extreme_values(&f, &q(2), &q(1), 4, 1, None),
            Err(CalculusError::DomainViolation { .. })
        ));
        assert!(matches!(
            extreme_values(&f, &q(0), &q(1), 0, 1, None),
            Err(CalculusError::DomainViolation { .. })
        ));
        let restricted = RealFunction::exact(
            FnExpr::poly(&[q(0), q(0), q(1)]),
            IntervalSet::closed(q(0), q(1)),
        );
        assert!(matches!(
            extreme_values(&restricted, &q(0), &q(2), 4, 1, None),
            Err(CalculusError::DomainViolation { .. })
        ));
    }
}
