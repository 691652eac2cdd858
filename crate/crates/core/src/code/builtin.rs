use super::StabilizerCode;
use crate::pauli::PauliOperator;

pub const BUILTIN_NAMES: [&str; 3] = ["five-qubit", "steane", "repetition3"];

fn ops(strings: &[&str]) -> Vec<PauliOperator> {
    strings
        .iter()
        .map(|s| s.parse().expect("valid literal"))
        .collect()
}

fn op(s: &str) -> PauliOperator {
    s.parse().expect("valid literal")
}

/// The `[[5, 1, 3]]` perfect code with cyclic generators `XZZXI` and shifts.
pub fn five_qubit() -> StabilizerCode {
    StabilizerCode::new(
        "five-qubit",
        ops(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]),
        op("XXXXX"),
        op("ZZZZZ"),
    )
    .expect("five-qubit code is valid")
}

/// Steane's `[[7, 1, 3]]` CSS code built from the Hamming `[7, 4]` checks.
pub fn steane() -> StabilizerCode {
    StabilizerCode::new(
        "steane",
        ops(&[
            "IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ",
        ]),
        op("XXXXXXX"),
        op("ZZZZZZZ"),
    )
    .expect("Steane code is valid")
}

/// The 3-qubit bit-flip repetition code. Distance 1 against phase errors;
/// mostly useful as a small exhaustive test case.
pub fn repetition3() -> StabilizerCode {
    StabilizerCode::new("repetition3", ops(&["ZZI", "IZZ"]), op("XXX"), op("ZZZ"))
        .expect("repetition code is valid")
}

/// Looks up a built-in code by name. Underscores are accepted for hyphens.
pub fn builtin(name: &str) -> Option<StabilizerCode> {
    match name.replace('_', "-").as_str() {
        "five-qubit" => Some(five_qubit()),
        "steane" => Some(steane()),
        "repetition3" => Some(repetition3()),
        _ => None,
    }
}
