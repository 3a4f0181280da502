//! Plain-text cone program format, used for test fixtures and for dumping
//! failed per-snapshot problems.
//!
//! ```text
//! cone-program 1
//! n 2
//! m 4
//! cones soc:3 zero:1
//! objective
//! 1.0 0.0
//! offset
//! 0.0 1.0 2.0 0.0
//! map
//! 1.0 0.0
//! 0.0 0.0
//! 0.0 0.0
//! 0.0 1.0
//! ```
//!
//! `map` holds the `m × n` matrix `Fᵀ`, one row per line. Values are written
//! in shortest round-trip decimal form, so `load(dump(p)) == p` exactly.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{Cone, ConeProgram};
use crate::{Error, Result};

const MAGIC: &str = "cone-program 1";

fn join(values: impl Iterator<Item = f64>) -> String {
    values.map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

pub fn dump(prog: &ConeProgram) -> String {
    let mut out = String::new();
    let cones: Vec<String> = prog
        .cones
        .iter()
        .map(|c| match c {
            Cone::Soc(k) => format!("soc:{k}"),
            Cone::Zero(k) => format!("zero:{k}"),
        })
        .collect();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "n {}", prog.num_vars());
    let _ = writeln!(out, "m {}", prog.num_rows());
    let _ = writeln!(out, "cones {}", cones.join(" "));
    let _ = writeln!(out, "objective\n{}", join(prog.objective.iter().copied()));
    let _ = writeln!(out, "offset\n{}", join(prog.offset.iter().copied()));
    let _ = writeln!(out, "map");
    for row in prog.map.row_iter() {
        let _ = writeln!(out, "{}", join(row.iter().copied()));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        for (k, raw) in self.inner.by_ref() {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.line = k + 1;
            return Ok(t);
        }
        Err(Error::Parse {
            line: self.line + 1,
            msg: "unexpected end of input".into(),
        })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let t = self.next()?;
        match t.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim()),
            _ => Err(self.err(format!("expected `{key}`, found `{t}`"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let v = self.keyed(key)?;
        v.parse().map_err(|_| self.err(format!("bad {key} `{v}`")))
    }

    fn numbers(&mut self, expected: usize) -> Result<Vec<f64>> {
        if expected == 0 {
            return Ok(Vec::new());
        }
        let t = self.next()?;
        let values = t
            .split_whitespace()
            .map(|w| w.parse::<f64>().map_err(|_| self.err(format!("bad number `{w}`"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != expected {
            return Err(self.err(format!("expected {expected} values, found {}", values.len())));
        }
        Ok(values)
    }
}

pub fn load(text: &str) -> Result<ConeProgram> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != MAGIC {
        return Err(lines.err(format!("expected header `{MAGIC}`")));
    }
    let n = lines.count("n")?;
    let m = lines.count("m")?;
    let cones = lines
        .keyed("cones")?
        .split_whitespace()
        .map(|w| {
            let (kind, dim) = w
                .split_once(':')
                .ok_or_else(|| lines.err(format!("bad cone `{w}`")))?;
            let dim: usize = dim.parse().map_err(|_| lines.err(format!("bad cone `{w}`")))?;
            match kind {
                "soc" => Ok(Cone::Soc(dim)),
                "zero" => Ok(Cone::Zero(dim)),
                _ => Err(lines.err(format!("unknown cone `{kind}`"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    lines.keyed("objective")?;
    let objective = DVector::from_vec(lines.numbers(n)?);
    lines.keyed("offset")?;
    let offset = DVector::from_vec(lines.numbers(m)?);
    lines.keyed("map")?;
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m {
        data.extend(lines.numbers(n)?);
    }
    let map = DMatrix::from_row_slice(m, n, &data);
    ConeProgram::new(objective, offset, map, cones)
}

pub fn write_file(prog: &ConeProgram, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, dump(prog))?;
    Ok(())
}

pub fn read_file(path: impl AsRef<Path>) -> Result<ConeProgram> {
    load(&std::fs::read_to_string(path)?)
}
