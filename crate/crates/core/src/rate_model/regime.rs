use serde::{Deserialize, Serialize};

use crate::numeric::rates_equal;

/// Which central-limit statement applies to a rate triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// `beta > gamma`: the normalized estimator is asymptotically normal
    /// whenever `V_0 > 0`.
    CltAlways,
    /// `beta = gamma`: normal limit if `S_k -> inf` and the level tail limit holds.
    BalancedConditional,
    /// `gamma > beta`, `beta < 2 alpha`: normal limit under the level tail
    /// limit and a lower bound on the growth of `S_k`.
    GammaDominantConditional,
    /// `gamma > beta = 2 alpha`: a bounded number of samples can carry a
    /// non-vanishing share of the variance, so no CLT statement is made.
    NotRelevant,
    /// `min(beta, gamma) > 2 alpha`, or a non-positive rate.
    Inadmissible,
}

/// Whether `lim inf S_k e^{(upsilon - gamma) k / 2} > 1` for some `upsilon`
/// in `[beta, 2 alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum Upsilon {
    #[default]
    Unknown,
    /// A witness value for which the lower bound holds.
    Exists(f64),
    /// Known that no such value exists.
    DoesNotExist,
}

/// Caller-supplied facts about the infinite level sequence. Limits over
/// infinite sequences cannot be decided from finite data, so families
/// provide these from their analytic form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct TailDescriptor {
    /// `S_k -> infinity`.
    pub partial_sums_diverge: Option<bool>,
    pub upsilon: Upsilon,
    /// `lim_l 1{V_l > 0} E[Z_l 1{Z_l > nu S_l^2 e^{(2 alpha - gamma) l}}] = 0`
    /// for every `nu > 0`.
    pub lim_cond: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub description: String,
    /// `None` when the descriptor does not say.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    pub conditions: Vec<Condition>,
    /// Conjunction of the conditions: `Some(false)` if any fails, `Some(true)`
    /// if all hold, `None` otherwise. `None` for `NotRelevant` and `Inadmissible`.
    pub clt_holds: Option<bool>,
}

const S_DIVERGES: &str = "S_k -> infinity";
const LIM_COND: &str =
    "lim_l 1{V_l > 0} E[Z_l 1{Z_l > nu S_l^2 e^{(2 alpha - gamma) l}}] = 0 for every nu > 0";
const UPSILON: &str =
    "exists upsilon in [beta, 2 alpha) with liminf_k S_k e^{(upsilon - gamma) k / 2} > 1";

/// Classifies `(alpha, beta, gamma)` into its CLT regime.
///
/// Equalities between rates are tested with a relative tolerance of `1e-9`.
/// The lower bound on `S_k` is read as a `liminf`.
pub fn classify_regime(alpha: f64, beta: f64, gamma: f64, tail: &TailDescriptor) -> Regime {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !(positive(alpha) && positive(beta) && positive(gamma)) {
        return Regime {
            kind: RegimeKind::Inadmissible,
            conditions: vec![Condition {
                description: "alpha, beta, gamma > 0".into(),
                holds: Some(false),
            }],
            clt_holds: None,
        };
    }
    let two_alpha = 2.0 * alpha;
    let min = beta.min(gamma);
    if min > two_alpha && !rates_equal(min, two_alpha) {
        return Regime {
            kind: RegimeKind::Inadmissible,
            conditions: vec![Condition {
                description: "min(beta, gamma) <= 2 alpha".into(),
                holds: Some(false),
            }],
            clt_holds: None,
        };
    }

    if rates_equal(beta, gamma) {
        let conditions = vec![
            Condition {
                description: S_DIVERGES.into(),
                holds: tail.partial_sums_diverge,
            },
            Condition {
                description: LIM_COND.into(),
                holds: tail.lim_cond,
            },
        ];
        return conditional(RegimeKind::BalancedConditional, conditions);
    }
    if beta > gamma {
        return Regime {
            kind: RegimeKind::CltAlways,
            conditions: vec![Condition {
                description: "V_0 > 0".into(),
                holds: Some(true),
            }],
            clt_holds: Some(true),
        };
    }
    if rates_equal(beta, two_alpha) {
        return Regime {
            kind: RegimeKind::NotRelevant,
            conditions: Vec::new(),
            clt_holds: None,
        };
    }
    let upsilon = match tail.upsilon {
        Upsilon::Unknown => None,
        Upsilon::DoesNotExist => Some(false),
        Upsilon::Exists(u) => Some(u >= beta && u < two_alpha),
    };
    let conditions = vec![
        Condition {
            description: LIM_COND.into(),
            holds: tail.lim_cond,
        },
        Condition {
            description: UPSILON.into(),
            holds: upsilon,
        },
    ];
    conditional(RegimeKind::GammaDominantConditional, conditions)
}

fn conditional(kind: RegimeKind, conditions: Vec<Condition>) -> Regime {
    let clt_holds = if conditions.iter().any(|c| c.holds == Some(false)) {
        Some(false)
    } else if conditions.iter().all(|c| c.holds == Some(true)) {
        Some(true)
    } else {
        None
    };
    Regime {
        kind,
        conditions,
        clt_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let none = TailDescriptor::default();
        assert_eq!(
            classify_regime(1.0, 1.5, 1.0, &none).kind,
            RegimeKind::CltAlways
        );
        let partition = TailDescriptor {
            partial_sums_diverge: Some(true),
            upsilon: Upsilon::Unknown,
            lim_cond: Some(true),
        };
        let r = classify_regime(0.75, 0.5, 0.5, &partition);
        assert_eq!(r.kind, RegimeKind::BalancedConditional);
        assert_eq!(r.clt_holds, Some(true));
        assert_eq!(
            classify_regime(1.0, 2.0, 3.0, &none).kind,
            RegimeKind::NotRelevant
        );
        assert_eq!(
            classify_regime(0.1, 1.0, 1.0, &none).kind,
            RegimeKind::Inadmissible
        );
    }

    #[test]
    fn gamma_dominant_conditions() {
        let good = TailDescriptor {
            partial_sums_diverge: Some(true),
            upsilon: Upsilon::Exists(1.0),
            lim_cond: Some(true),
        };
        let r = classify_regime(1.0, 0.5, 1.5, &good);
        assert_eq!(r.kind, RegimeKind::GammaDominantConditional);
        assert_eq!(r.clt_holds, Some(true));

        let out_of_range = TailDescriptor {
            upsilon: Upsilon::Exists(2.0),
            ..good
        };
        assert_eq!(
            classify_regime(1.0, 0.5, 1.5, &out_of_range).clt_holds,
            Some(false)
        );
        let unknown = TailDescriptor {
            lim_cond: None,
            ..good
        };
        assert_eq!(classify_regime(1.0, 0.5, 1.5, &unknown).clt_holds, None);
    }

    #[test]
    fn nonpositive_rates_are_inadmissible() {
        let none = TailDescriptor::default();
        assert_eq!(
            classify_regime(0.0, 1.0, 1.0, &none).kind,
            RegimeKind::Inadmissible
        );
        assert_eq!(
            classify_regime(1.0, f64::NAN, 1.0, &none).kind,
            RegimeKind::Inadmissible
        );
    }
}
