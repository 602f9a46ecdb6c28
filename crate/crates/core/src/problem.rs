//! Unicast-uniprior problem instances: validation, receiver splitting, and
//! the demand-table count.
//!
//! Messages are 1-based `x_1 ... x_n` in files and reports, 0-based inside
//! this crate. All parsing and rendering shifts at the boundary.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One receiver: the messages it demands and the messages it caches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub wants: BTreeSet<usize>,
    pub has: BTreeSet<usize>,
}

/// A unicast-uniprior index coding instance over messages `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCodingProblem {
    n: usize,
    receivers: Vec<Receiver>,
}

/// A broken instance invariant, reported with the offending ids (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A message demanded by two receivers.
    Unicast {
        message: usize,
        receivers: (usize, usize),
    },
    /// A message cached by two receivers.
    Uniprior {
        message: usize,
        receivers: (usize, usize),
    },
    /// A message missing from the union of all demand or cache sets.
    Coverage { message: usize, missing_from: CoverageSide },
    /// A receiver demanding a message it already caches.
    SelfKnowledge { receiver: usize, message: usize },
    /// A message id outside `1..=n`.
    OutOfRange { receiver: usize, message: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageSide {
    Wants,
    Has,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unicast { message, receivers } => write!(
                f,
                "UnicastViolation: message x{} demanded by receivers D{} and D{}",
                message, receivers.0, receivers.1
            ),
            Violation::Uniprior { message, receivers } => write!(
                f,
                "UnipriorViolation: message x{} cached by receivers D{} and D{}",
                message, receivers.0, receivers.1
            ),
            Violation::Coverage { message, missing_from } => write!(
                f,
                "CoverageViolation: message x{} appears in no receiver's {}",
                message,
                match missing_from {
                    CoverageSide::Wants => "demand set",
                    CoverageSide::Has => "side-information set",
                }
            ),
            Violation::SelfKnowledge { receiver, message } => write!(
                f,
                "SelfKnowledgeViolation: receiver D{receiver} demands message x{message} it already caches"
            ),
            Violation::OutOfRange { receiver, message } => write!(
                f,
                "OutOfRangeViolation: receiver D{receiver} references message x{message} outside the instance"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed instance document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("receiver {receiver}: duplicate id {id} in `{field}`")]
    DuplicateId {
        receiver: usize,
        field: &'static str,
        id: u64,
    },
    #[error("receiver {receiver}: id {id} in `{field}` outside 1..={n}")]
    IdOutOfRange {
        receiver: usize,
        field: &'static str,
        id: u64,
        n: usize,
    },
}

#[derive(Serialize, Deserialize)]
struct ReceiverDoc {
    wants: Vec<u64>,
    has: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    n: usize,
    receivers: Vec<ReceiverDoc>,
}

/// The split of a unicast-uniprior instance into one row per message.
///
/// Row `i` demands message `i` and inherits the cache of the receiver that
/// demanded it; `row_group_of[i]` records that receiver's index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleUnicastProblem {
    pub n: usize,
    pub prior_of_row: Vec<BTreeSet<usize>>,
    pub row_group_of: Vec<usize>,
}

impl IndexCodingProblem {
    pub fn new(n: usize, receivers: Vec<Receiver>) -> Self {
        IndexCodingProblem { n, receivers }
    }

    /// Builds from 1-based `(wants, has)` pairs, as written in instance files.
    pub fn from_one_based(n: usize, receivers: &[(&[usize], &[usize])]) -> Self {
        let receivers = receivers
            .iter()
            .map(|(w, h)| Receiver {
                wants: w.iter().map(|&x| x - 1).collect(),
                has: h.iter().map(|&x| x - 1).collect(),
            })
            .collect();
        IndexCodingProblem { n, receivers }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn n_receivers(&self) -> usize {
        self.receivers.len()
    }

    pub fn demand_sizes(&self) -> Vec<usize> {
        self.receivers.iter().map(|r| r.wants.len()).collect()
    }

    /// Largest demand-set size; width of the demand table.
    pub fn w_max(&self) -> usize {
        self.demand_sizes().into_iter().max().unwrap_or(0)
    }

    /// Checks every instance invariant and returns the violations found.
    ///
    /// An empty list means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n;
        let mut wanted_by: Vec<Option<usize>> = vec![None; n];
        let mut known_by: Vec<Option<usize>> = vec![None; n];

        for (k, recv) in self.receivers.iter().enumerate() {
            for &m in recv.wants.iter().chain(recv.has.iter()) {
                if m >= n {
                    out.push(Violation::OutOfRange {
                        receiver: k + 1,
                        message: m + 1,
                    });
                }
            }
            for &m in &recv.wants {
                if m >= n {
                    continue;
                }
                match wanted_by[m] {
                    None => wanted_by[m] = Some(k),
                    Some(prev) => out.push(Violation::Unicast {
                        message: m + 1,
                        receivers: (prev + 1, k + 1),
                    }),
                }
            }
            for &m in &recv.has {
                if m >= n {
                    continue;
                }
                match known_by[m] {
                    None => known_by[m] = Some(k),
                    Some(prev) => out.push(Violation::Uniprior {
                        message: m + 1,
                        receivers: (prev + 1, k + 1),
                    }),
                }
            }
            for &m in recv.wants.intersection(&recv.has) {
                out.push(Violation::SelfKnowledge {
                    receiver: k + 1,
                    message: m + 1,
                });
            }
        }
        for m in 0..n {
            if wanted_by[m].is_none() {
                out.push(Violation::Coverage {
                    message: m + 1,
                    missing_from: CoverageSide::Wants,
                });
            }
            if known_by[m].is_none() {
                out.push(Violation::Coverage {
                    message: m + 1,
                    missing_from: CoverageSide::Has,
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Receiver index demanding each message. Requires a valid instance.
    pub fn owner_of_message(&self) -> Vec<usize> {
        let mut owner = vec![usize::MAX; self.n];
        for (k, recv) in self.receivers.iter().enumerate() {
            for &m in &recv.wants {
                owner[m] = k;
            }
        }
        owner
    }

    /// Receiver index caching each message, if any.
    pub fn knower_of_message(&self) -> Vec<Option<usize>> {
        let mut knower = vec![None; self.n];
        for (k, recv) in self.receivers.iter().enumerate() {
            for &m in &recv.has {
                knower[m] = Some(k);
            }
        }
        knower
    }

    /// Splits each receiver into one row per demanded message.
    pub fn split_to_single_unicast(&self) -> Result<SingleUnicastProblem, Vec<Violation>> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(violations);
        }
        let mut prior_of_row = vec![BTreeSet::new(); self.n];
        let mut row_group_of = vec![0usize; self.n];
        for (k, recv) in self.receivers.iter().enumerate() {
            for &m in &recv.wants {
                prior_of_row[m] = recv.has.clone();
                row_group_of[m] = k;
            }
        }
        Ok(SingleUnicastProblem {
            n: self.n,
            prior_of_row,
            row_group_of,
        })
    }

    /// Number of ways to fill the demand table: the product over receivers
    /// of `C(w_max, |W_i|) * |W_i|!`.
    pub fn table_instance_count(&self) -> BigUint {
        let w_max = self.w_max();
        let mut beta = BigUint::from(1u8);
        for size in self.demand_sizes() {
            beta *= binomial(w_max, size) * factorial(size);
        }
        beta
    }

    /// Total free positions of the fitting pattern: the sum over messages of
    /// the demand-set size of the receiver caching them.
    pub fn sum_kappa(&self) -> usize {
        let sizes = self.demand_sizes();
        self.knower_of_message()
            .iter()
            .flatten()
            .map(|&k| sizes[k])
            .sum()
    }

    /// Parses the instance file format: a JSON document with `n` and a
    /// `receivers` array of `{wants, has}` id arrays (1-based).
    pub fn from_json_str(text: &str) -> Result<Self, ParseError> {
        let doc: ProblemDoc = serde_json::from_str(text)?;
        let n = doc.n;
        let mut receivers = Vec::with_capacity(doc.receivers.len());
        for (idx, r) in doc.receivers.iter().enumerate() {
            let convert = |ids: &[u64], field: &'static str| -> Result<BTreeSet<usize>, ParseError> {
                let mut set = BTreeSet::new();
                for &id in ids {
                    if id < 1 || id as usize > n {
                        return Err(ParseError::IdOutOfRange {
                            receiver: idx + 1,
                            field,
                            id,
                            n,
                        });
                    }
                    if !set.insert(id as usize - 1) {
                        return Err(ParseError::DuplicateId {
                            receiver: idx + 1,
                            field,
                            id,
                        });
                    }
                }
                Ok(set)
            };
            receivers.push(Receiver {
                wants: convert(&r.wants, "wants")?,
                has: convert(&r.has, "has")?,
            });
        }
        Ok(IndexCodingProblem { n, receivers })
    }

    /// Renders the instance file format (1-based ids).
    pub fn to_json_string(&self) -> String {
        let doc = ProblemDoc {
            n: self.n,
            receivers: self
                .receivers
                .iter()
                .map(|r| ReceiverDoc {
                    wants: r.wants.iter().map(|&m| m as u64 + 1).collect(),
                    has: r.has.iter().map(|&m| m as u64 + 1).collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("instance serialization");
        s.push('\n');
        s
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).map(BigUint::from).product()
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let mut num = BigUint::from(1u8);
    for i in 0..k {
        num *= BigUint::from((n - i) as u64);
    }
    num / factorial(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn sample_instance_is_valid() {
        assert!(samples::five_messages().validate().is_empty());
        assert!(samples::ten_messages_five_receivers().validate().is_empty());
        assert!(samples::ten_messages_three_receivers().validate().is_empty());
        assert!(samples::twelve_messages().validate().is_empty());
    }

    #[test]
    fn uniprior_violation_detected() {
        // x4 cached by both D1 and D3
        let p = IndexCodingProblem::from_one_based(
            5,
            &[
                (&[1, 2], &[4]),
                (&[3, 4], &[5, 1]),
                (&[5], &[2, 3, 4]),
            ],
        );
        let v = p.validate();
        assert!(v.contains(&Violation::Uniprior {
            message: 4,
            receivers: (1, 3)
        }));
    }

    #[test]
    fn unicast_violation_detected() {
        let p = IndexCodingProblem::from_one_based(1, &[(&[1], &[]), (&[1], &[])]);
        let v = p.validate();
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::Unicast { message: 1, .. })));
    }

    #[test]
    fn coverage_and_self_knowledge() {
        let p = IndexCodingProblem::from_one_based(1, &[(&[1], &[])]);
        assert!(p.validate().contains(&Violation::Coverage {
            message: 1,
            missing_from: CoverageSide::Has
        }));

        let p = IndexCodingProblem::from_one_based(1, &[(&[1], &[1])]);
        assert!(p.validate().contains(&Violation::SelfKnowledge {
            receiver: 1,
            message: 1
        }));
    }

    #[test]
    fn out_of_range_detected() {
        let p = IndexCodingProblem::from_one_based(2, &[(&[1, 2], &[3])]);
        assert!(p.validate().contains(&Violation::OutOfRange {
            receiver: 1,
            message: 3
        }));
    }

    #[test]
    fn split_matches_expected_rows() {
        let p = samples::five_messages();
        let s = p.split_to_single_unicast().unwrap();
        assert_eq!(s.n, 5);
        let prior = |row: usize| -> Vec<usize> {
            s.prior_of_row[row - 1].iter().map(|&m| m + 1).collect()
        };
        assert_eq!(prior(1), vec![4]);
        assert_eq!(prior(2), vec![4]);
        assert_eq!(prior(3), vec![1, 5]);
        assert_eq!(prior(4), vec![1, 5]);
        assert_eq!(prior(5), vec![2, 3]);
        assert_eq!(s.row_group_of, vec![0, 0, 1, 1, 2]);
    }

    #[test]
    fn split_rejects_invalid() {
        let p = IndexCodingProblem::from_one_based(1, &[(&[1], &[])]);
        assert!(p.split_to_single_unicast().is_err());
    }

    #[test]
    fn split_is_identity_for_single_demands() {
        let p = IndexCodingProblem::from_one_based(
            3,
            &[(&[1], &[2]), (&[2], &[3]), (&[3], &[1])],
        );
        let s = p.split_to_single_unicast().unwrap();
        assert_eq!(s.row_group_of, vec![0, 1, 2]);
        for (k, recv) in p.receivers().iter().enumerate() {
            let row = *recv.wants.iter().next().unwrap();
            assert_eq!(s.prior_of_row[row], recv.has);
        }
    }

    #[test]
    fn each_message_cached_in_exactly_one_row_group() {
        for p in [
            samples::five_messages(),
            samples::ten_messages_five_receivers(),
            samples::ten_messages_three_receivers(),
            samples::twelve_messages(),
        ] {
            let s = p.split_to_single_unicast().unwrap();
            for m in 0..s.n {
                let groups: BTreeSet<usize> = (0..s.n)
                    .filter(|&row| s.prior_of_row[row].contains(&m))
                    .map(|row| s.row_group_of[row])
                    .collect();
                assert_eq!(groups.len(), 1, "message {m} cached by {groups:?}");
            }
        }
    }

    #[test]
    fn table_counts_match_formula() {
        assert_eq!(
            samples::five_messages().table_instance_count(),
            BigUint::from(8u32)
        );
        assert_eq!(
            samples::ten_messages_five_receivers().table_instance_count(),
            BigUint::from(3888u32)
        );
        assert_eq!(
            samples::ten_messages_three_receivers().table_instance_count(),
            BigUint::from(13824u32)
        );
        assert_eq!(
            samples::twelve_messages().table_instance_count(),
            BigUint::from(864000u32)
        );
        // single receiver, single demand
        let p = IndexCodingProblem::from_one_based(1, &[(&[1], &[])]);
        assert_eq!(p.table_instance_count(), BigUint::from(1u8));
    }

    #[test]
    fn sum_kappa_matches_known_values() {
        assert_eq!(samples::five_messages().sum_kappa(), 8);
        assert_eq!(samples::ten_messages_five_receivers().sum_kappa(), 20);
        assert_eq!(samples::ten_messages_three_receivers().sum_kappa(), 34);
        assert_eq!(samples::twelve_messages().sum_kappa(), 49);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let p = samples::five_messages();
        let text = p.to_json_string();
        let back = IndexCodingProblem::from_json_str(&text).unwrap();
        assert_eq!(p, back);

        assert!(matches!(
            IndexCodingProblem::from_json_str("{"),
            Err(ParseError::Json(_))
        ));
        assert!(matches!(
            IndexCodingProblem::from_json_str(
                r#"{"n": 2, "receivers": [{"wants": [1, 1], "has": [2]}]}"#
            ),
            Err(ParseError::DuplicateId { .. })
        ));
        assert!(matches!(
            IndexCodingProblem::from_json_str(
                r#"{"n": 2, "receivers": [{"wants": [1], "has": [3]}]}"#
            ),
            Err(ParseError::IdOutOfRange { .. })
        ));
    }
}
