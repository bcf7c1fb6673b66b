use std::fmt;

use serde::Serialize;

use crate::bits::BitString;

/// Depth-2 circuit for property (2): an AND over heavy strings of the OR of
/// the slice members containing each of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circuit {
    pub n: usize,
    /// `(heavy string, members containing it)`.
    pub clauses: Vec<(u64, Vec<usize>)>,
}

impl Circuit {
    pub fn eval(&self, mask: &[bool]) -> bool {
        self.clauses.iter().all(|(_, vars)| vars.iter().any(|&v| mask[v]))
    }

    /// Gate count: one OR per clause plus the output AND.
    pub fn size(&self) -> usize {
        self.clauses.len() + 1
    }
}

/// One clause per line: `y=0101: b3 | b7 | b12`. An empty circuit prints
/// `true`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return writeln!(f, "true");
        }
        for (y, vars) in &self.clauses {
            let ors: Vec<String> = vars.iter().map(|v| format!("b{v}")).collect();
            writeln!(f, "y={}: {}", BitString::from_u64(*y, self.n), ors.join(" | "))?;
        }
        Ok(())
    }
}
