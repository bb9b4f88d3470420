//! Shared example matrices for integration tests: the two bundled Two-Moon
//! weight matrices (8x4 under the l-infinity cost norm, 10x4 under l1).

use recourse_core::WeightMatrix;

pub const TWO_MOON_LINF: [[f64; 4]; 8] = [
    [0.548, 0.425, 0.611, 0.594],
    [0.667, 0.413, 0.695, 0.703],
    [0.539, 0.488, 0.521, 0.949],
    [0.488, 0.687, 0.666, 0.484],
    [0.773, 0.354, 0.793, 0.896],
    [0.576, 0.582, 0.557, 0.834],
    [0.558, 0.765, 0.545, 0.626],
    [0.417, 0.557, 0.558, 0.415],
];

pub const TWO_MOON_L1: [[f64; 4]; 10] = [
    [0.256, 0.104, 0.256, 0.353],
    [0.383, 0.096, 0.366, 0.441],
    [0.179, 0.148, 0.129, 0.902],
    [0.415, 0.064, 0.432, 0.800],
    [0.187, 0.237, 0.168, 0.694],
    [0.299, 0.499, 0.178, 0.393],
    [0.165, 0.214, 0.198, 0.171],
    [0.211, 0.021, 0.230, 0.251],
    [0.509, 0.049, 0.535, 0.727],
    [0.368, 0.830, 0.314, 0.395],
];

pub fn two_moon_linf() -> WeightMatrix {
    WeightMatrix::from_rows(TWO_MOON_LINF.iter().map(|r| r.to_vec()).collect(), 10.0).unwrap()
}

pub fn two_moon_l1() -> WeightMatrix {
    WeightMatrix::from_rows(TWO_MOON_L1.iter().map(|r| r.to_vec()).collect(), 20.0).unwrap()
}
