//! Reversible circuits built from ESOP covers: one multi-controlled X per
//! cube, with classical basis-state simulation and text emitters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CostReport;
use crate::database::Database;
use crate::error::{Error, Result};
use crate::esop::{Cover, Literal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    /// Fires when the address qubit is 0.
    #[serde(rename = "neg")]
    Negative,
    #[serde(rename = "pos")]
    Positive,
}

/// `(address qubit, polarity)`; serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Control(pub usize, pub Polarity);

impl Control {
    pub fn qubit(&self) -> usize {
        self.0
    }

    pub fn polarity(&self) -> Polarity {
        self.1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub controls: Vec<Control>,
    pub target: usize,
}

impl Gate {
    /// True when every control is satisfied by address `a` (qubit 0 = MSB).
    pub fn fires(&self, n: usize, a: usize) -> bool {
        self.controls.iter().all(|&Control(q, pol)| {
            let bit = (a >> (n - 1 - q)) & 1 == 1;
            bit == (pol == Polarity::Positive)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub d: usize,
    pub gates: Vec<Gate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub address: usize,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub ok: bool,
    pub mismatch: Option<Mismatch>,
}

/// One gate per cube: `1` becomes a positive control, `0` a negative one,
/// and an all-don't-care cube an unconditional X. Gates are grouped by
/// target and follow cube order within a target.
pub fn emit_circuit(n: usize, covers: &[Cover]) -> Circuit {
    let mut gates = Vec::new();
    for (target, cover) in covers.iter().enumerate() {
        assert_eq!(cover.n(), n, "cover width mismatch");
        let mut cubes = cover.cubes().to_vec();
        cubes.sort();
        for cube in cubes {
            let controls = cube
                .literals()
                .enumerate()
                .filter_map(|(q, lit)| match lit {
                    Literal::Zero => Some(Control(q, Polarity::Negative)),
                    Literal::One => Some(Control(q, Polarity::Positive)),
                    Literal::DontCare => None,
                })
                .collect();
            gates.push(Gate { controls, target });
        }
    }
    Circuit {
        n,
        d: covers.len(),
        gates,
    }
}

impl Circuit {
    pub fn empty(n: usize, d: usize) -> Circuit {
        Circuit { n, d, gates: Vec::new() }
    }

    /// Data word written for basis address `a`.
    pub fn simulate(&self, a: usize) -> Result<u64> {
        if a >> self.n != 0 {
            return Err(Error::AddressOutOfRange {
                address: a as u64,
                width: self.n,
            });
        }
        let mut word = 0u64;
        for g in &self.gates {
            if g.fires(self.n, a) {
                word ^= 1 << (self.d - 1 - g.target);
            }
        }
        Ok(word)
    }

    /// Checks the circuit writes `db[a]` for every address; reports the
    /// smallest failing address.
    pub fn verify(&self, db: &Database) -> Result<Verification> {
        if db.n() != self.n {
            return Err(Error::SizeMismatch {
                what: "address width",
                got: db.n(),
                expected: self.n,
            });
        }
        if db.d() != self.d {
            return Err(Error::SizeMismatch {
                what: "data width",
                got: db.d(),
                expected: self.d,
            });
        }
        for (address, &expected) in db.entries().iter().enumerate() {
            let actual = self.simulate(address)?;
            if actual != expected {
                return Ok(Verification {
                    ok: false,
                    mismatch: Some(Mismatch {
                        address,
                        expected,
                        actual,
                    }),
                });
            }
        }
        Ok(Verification {
            ok: true,
            mismatch: None,
        })
    }

    pub fn gate_histogram(&self) -> BTreeMap<usize, u64> {
        let mut hist = BTreeMap::new();
        for g in &self.gates {
            *hist.entry(g.controls.len()).or_insert(0) += 1;
        }
        hist
    }

    pub fn cost_report(&self) -> CostReport {
        CostReport::from_histogram(self.n, self.d, self.gate_histogram())
    }

    /// OpenQASM 3 text. Negative controls are conjugated with X on the
    /// address qubit, which adds only Clifford gates.
    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n");
        let _ = writeln!(
            out,
            "// {} address qubits (addr[0] = address MSB), {} data qubits (data[0] = word MSB)",
            self.n, self.d
        );
        let _ = writeln!(out, "qubit[{}] addr;", self.n);
        let _ = writeln!(out, "qubit[{}] data;", self.d);
        for g in &self.gates {
            let negated: Vec<usize> = g
                .controls
                .iter()
                .filter(|c| c.polarity() == Polarity::Negative)
                .map(Control::qubit)
                .collect();
            for q in &negated {
                let _ = writeln!(out, "x addr[{q}];");
            }
            let mut operands: Vec<String> = g.controls.iter().map(|c| format!("addr[{}]", c.qubit())).collect();
            operands.push(format!("data[{}]", g.target));
            let op = match g.controls.len() {
                0 => "x".to_string(),
                1 => "cx".to_string(),
                2 => "ccx".to_string(),
                k => format!("ctrl({k}) @ x"),
            };
            let _ = writeln!(out, "{op} {};", operands.join(", "));
            for q in &negated {
                let _ = writeln!(out, "x addr[{q}];");
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Circuit> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let c: Circuit = serde_json::from_str(&text)?;
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        for g in &self.gates {
            if g.target >= self.d {
                return Err(Error::SizeMismatch {
                    what: "gate target",
                    got: g.target,
                    expected: self.d,
                });
            }
            let mut seen = vec![false; self.n];
            for c in &g.controls {
                if c.qubit() >= self.n || std::mem::replace(&mut seen[c.qubit()], true) {
                    return Err(Error::Config(format!("bad control qubit {} on gate {g:?}", c.qubit())));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::esop::{minimize_all, Cube};

    fn cover(n: usize, cubes: &[&str]) -> Cover {
        Cover::new(n, cubes.iter().map(|s| s.parse::<Cube>().unwrap()).collect())
    }

    #[test]
    fn cube_to_gate() {
        let covers = vec![cover(3, &[]), cover(3, &[]), cover(3, &["01-"])];
        let c = emit_circuit(3, &covers);
        assert_eq!(
            c.gates,
            vec![Gate {
                controls: vec![Control(0, Polarity::Negative), Control(1, Polarity::Positive)],
                target: 2
            }]
        );
        let x = emit_circuit(3, &[cover(3, &["---"])]);
        assert!(x.gates[0].controls.is_empty());
    }

    #[test]
    fn json_gate_form() {
        let c = emit_circuit(3, &[cover(3, &[]), cover(3, &[]), cover(3, &["01-"])]);
        let v = serde_json::to_value(&c.gates).unwrap();
        assert_eq!(v.to_string(), r#"[{"controls":[[0,"neg"],[1,"pos"]],"target":2}]"#);
    }

    #[test]
    fn empty_circuit() {
        let c = Circuit::empty(2, 3);
        assert!((0..4).all(|a| c.simulate(a).unwrap() == 0));
        assert!(c.simulate(4).is_err());
        let db = Database::new(3, vec![0; 4]).unwrap();
        assert!(c.verify(&db).unwrap().ok);
        assert_eq!(
            c.to_qasm(),
            "OPENQASM 3.0;\ninclude \"stdgates.inc\";\n\
             // 2 address qubits (addr[0] = address MSB), 3 data qubits (data[0] = word MSB)\n\
             qubit[2] addr;\nqubit[3] data;\n"
        );
    }

    #[test]
    fn motivation_circuit_is_exact() {
        let db = Database::parse("1110\n1001\n0100\n1111\n").unwrap();
        let c = emit_circuit(2, &minimize_all(&db));
        for a in 0..4 {
            assert_eq!(c.simulate(a).unwrap(), db.entry(a));
        }
        assert!(c.verify(&db).unwrap().ok);
    }

    #[test]
    fn motivation_gate_counts() {
        // 4 CCX + 3 CX for the original ordering, 2 CCX + 4 CX after
        // swapping the words at addresses 00 and 10.
        let db = Database::parse("1110\n1001\n0100\n1111\n").unwrap();
        let before = emit_circuit(2, &minimize_all(&db)).cost_report();
        assert_eq!(before.gate_histogram, BTreeMap::from([(1, 3), (2, 4)]));
        let swap = crate::database::Permutation::from_mapping(vec![2, 1, 0, 3]).unwrap();
        let after = emit_circuit(2, &minimize_all(&db.reorder(&swap).unwrap())).cost_report();
        assert_eq!(after.gate_histogram, BTreeMap::from([(1, 4), (2, 2)]));
    }

    #[test]
    fn deleted_gate_is_caught() {
        let db = Database::random(4, 5, 17).unwrap();
        let mut c = emit_circuit(4, &minimize_all(&db));
        c.gates.remove(0);
        let v = c.verify(&db).unwrap();
        assert!(!v.ok);
        let m = v.mismatch.unwrap();
        assert_ne!(m.expected, m.actual);
        assert!((0..m.address).all(|a| c.simulate(a).unwrap() == db.entry(a)));
    }

    #[test]
    fn verify_dimension_mismatch() {
        let db = Database::random(3, 4, 1).unwrap();
        assert!(Circuit::empty(2, 4).verify(&db).is_err());
        assert!(Circuit::empty(3, 5).verify(&db).is_err());
    }

    #[test]
    fn qasm_single_cx_and_negation() {
        let c = emit_circuit(3, &[cover(3, &["1--"])]);
        let q = c.to_qasm();
        let body: Vec<&str> = q.lines().skip(5).collect();
        assert_eq!(body, ["cx addr[0], data[0];"]);

        let c = emit_circuit(3, &[cover(3, &["0-1"]), cover(3, &["011"])]);
        let body: Vec<String> = c.to_qasm().lines().skip(5).map(String::from).collect();
        assert_eq!(
            body,
            [
                "x addr[0];",
                "ccx addr[0], addr[2], data[0];",
                "x addr[0];",
                "x addr[0];",
                "ctrl(3) @ x addr[0], addr[1], addr[2], data[1];",
                "x addr[0];"
            ]
        );
        assert_eq!(c.to_qasm(), c.to_qasm());
    }

    #[test]
    fn histogram_matches_cover_literals() {
        let db = Database::random(5, 6, 4).unwrap();
        let covers = minimize_all(&db);
        let c = emit_circuit(5, &covers);
        assert_eq!(c.cost_report(), CostReport::from_covers(5, &covers));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let db = Database::random(3, 3, 2).unwrap();
        let c = emit_circuit(3, &minimize_all(&db));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, c.to_json().unwrap()).unwrap();
        assert_eq!(Circuit::load_json(&path).unwrap(), c);
        fs::write(&path, r#"{"n":2,"d":1,"gates":[{"controls":[[5,"pos"]],"target":0}]}"#).unwrap();
        assert!(Circuit::load_json(&path).is_err());
    }
}
