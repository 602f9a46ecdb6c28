//! Bundled sample instances with independently verified minranks.
//!
//! These drive the CLI self-test and anchor the test suite. The expected
//! values for the two larger instances come from the fast solver cross-checked
//! against brute force on reduced variants; the smaller two are confirmed by
//! the full brute-force sweep.

use crate::problem::IndexCodingProblem;

/// n=5, three receivers. Small enough for every exhaustive check.
pub fn five_messages() -> IndexCodingProblem {
    IndexCodingProblem::from_one_based(
        5,
        &[(&[1, 2], &[4]), (&[3, 4], &[5, 1]), (&[5], &[2, 3])],
    )
}

/// n=10, five receivers with uneven demand sizes.
pub fn ten_messages_five_receivers() -> IndexCodingProblem {
    IndexCodingProblem::from_one_based(
        10,
        &[
            (&[1, 2], &[3]),
            (&[3, 5], &[1, 4]),
            (&[4, 6], &[5, 9, 8]),
            (&[9], &[10, 7]),
            (&[7, 8, 10], &[2, 6]),
        ],
    )
}

/// n=10, three receivers.
pub fn ten_messages_three_receivers() -> IndexCodingProblem {
    IndexCodingProblem::from_one_based(
        10,
        &[
            (&[1, 6, 10], &[2, 4, 9]),
            (&[2, 4, 7, 9], &[3, 5, 8, 10]),
            (&[3, 5, 8], &[1, 6, 7]),
        ],
    )
}

/// n=12, three receivers; the largest bundled instance.
pub fn twelve_messages() -> IndexCodingProblem {
    IndexCodingProblem::from_one_based(
        12,
        &[
            (&[1, 2, 3, 4], &[5, 9, 10, 11, 12]),
            (&[5, 6, 7], &[1, 2, 8]),
            (&[8, 9, 10, 11, 12], &[3, 4, 6, 7]),
        ],
    )
}

/// A self-test case: instance plus frozen expected values.
pub struct SampleCase {
    pub name: &'static str,
    pub problem: fn() -> IndexCodingProblem,
    pub minrank: usize,
    pub beta: u64,
    /// Whether the brute-force sweep fits the default budget.
    pub brute_feasible: bool,
}

pub const SAMPLE_CASES: &[SampleCase] = &[
    SampleCase {
        name: "n5-three-receivers",
        problem: five_messages,
        minrank: 3,
        beta: 8,
        brute_feasible: true,
    },
    SampleCase {
        name: "n10-five-receivers",
        problem: ten_messages_five_receivers,
        minrank: 7,
        beta: 3888,
        brute_feasible: true,
    },
    SampleCase {
        name: "n10-three-receivers",
        problem: ten_messages_three_receivers,
        minrank: 7,
        beta: 13824,
        brute_feasible: false,
    },
    SampleCase {
        name: "n12-three-receivers",
        problem: twelve_messages,
        minrank: 8,
        beta: 864000,
        brute_feasible: false,
    },
];
