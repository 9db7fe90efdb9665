//! Plain-text LMI dump format.
//!
//! ```text
//! lmi 1
//! vars <m>
//! objective <c_1> ... <c_m>
//! block <d> real|complex
//! const
//! <d rows of the real part>
//! [im
//!  <d rows of the imaginary part>]      (complex blocks only)
//! coeff <i>
//! ...                                   (same layout; omitted = zero)
//! endblock
//! scalar <constant> <b_1> ... <b_m>     (constant + b^T y >= 0)
//! ```
//!
//! Numbers are decimal, rows are whitespace separated, `#` starts a comment.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{LmiBlock, ScalarConstraint, SdpProblem};
use crate::linalg::{HermMatrix, Matrix};
use crate::{Error, Result};

fn write_rows(out: &mut String, m: &Matrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn write_herm(out: &mut String, h: &HermMatrix, complex: bool) {
    write_rows(out, &h.re);
    if complex {
        out.push_str("im\n");
        write_rows(out, &h.im);
    }
}

pub fn to_lmi_text(p: &SdpProblem) -> String {
    let mut out = String::new();
    out.push_str("lmi 1\n");
    let _ = writeln!(out, "vars {}", p.n_vars);
    let obj: Vec<String> = p.objective.iter().map(|v| format!("{v:e}")).collect();
    let _ = writeln!(out, "objective {}", obj.join(" "));
    for b in &p.blocks {
        let complex = !b.is_real();
        let _ = writeln!(
            out,
            "block {} {}",
            b.dim(),
            if complex { "complex" } else { "real" }
        );
        out.push_str("const\n");
        write_herm(&mut out, &b.constant, complex);
        for (i, c) in b.coeffs.iter().enumerate() {
            if let Some(c) = c {
                let _ = writeln!(out, "coeff {i}");
                write_herm(&mut out, c, complex);
            }
        }
        out.push_str("endblock\n");
    }
    for s in &p.scalars {
        let coeffs: Vec<String> = s.coeffs.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(out, "scalar {:e} {}", s.constant, coeffs.join(" "));
    }
    out
}

struct Lines<'a> {
    inner: core::iter::Peekable<core::iter::Enumerate<core::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (no, line) in self.inner.by_ref() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((no + 1, line));
            }
        }
        None
    }

    fn expect(&mut self) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| bad(0, "unexpected end of input"))
    }
}

fn bad(line: usize, msg: &str) -> Error {
    Error::MalformedProblem(format!("LMI text line {line}: {msg}"))
}

fn numbers(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| bad(line, &format!("bad number `{t}`")))
        })
        .collect()
}

fn read_matrix(lines: &mut Lines<'_>, d: usize) -> Result<Matrix> {
    let mut data = Vec::with_capacity(d * d);
    for _ in 0..d {
        let (no, l) = lines.expect()?;
        let row = numbers(no, l)?;
        if row.len() != d {
            return Err(bad(
                no,
                &format!("expected {d} entries, found {}", row.len()),
            ));
        }
        data.extend(row);
    }
    Ok(Matrix::from_vec(d, d, data))
}

fn read_herm(lines: &mut Lines<'_>, d: usize, complex: bool) -> Result<HermMatrix> {
    let re = read_matrix(lines, d)?;
    let im = if complex {
        let (no, l) = lines.expect()?;
        if l != "im" {
            return Err(bad(no, "expected `im`"));
        }
        read_matrix(lines, d)?
    } else {
        Matrix::zeros(d, d)
    };
    Ok(HermMatrix { re, im })
}

fn keyword<'a>(no: usize, l: &'a str, kw: &str) -> Result<&'a str> {
    l.strip_prefix(kw)
        .map(str::trim)
        .ok_or_else(|| bad(no, &format!("expected `{kw}`")))
}

pub fn from_lmi_text(text: &str) -> Result<SdpProblem> {
    let mut lines = Lines {
        inner: text.lines().enumerate().peekable(),
    };
    let (no, l) = lines.expect()?;
    if l != "lmi 1" {
        return Err(bad(no, "missing `lmi 1` header"));
    }
    let (no, l) = lines.expect()?;
    let m: usize = keyword(no, l, "vars")?
        .parse()
        .map_err(|_| bad(no, "bad variable count"))?;
    let (no, l) = lines.expect()?;
    let objective = numbers(no, keyword(no, l, "objective")?)?;
    if objective.len() != m {
        return Err(bad(no, "objective length differs from `vars`"));
    }
    let mut p = SdpProblem::new(objective);
    while let Some((no, l)) = lines.next() {
        if let Some(rest) = l.strip_prefix("block") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let (d, complex) = match parts.as_slice() {
                [d, kind] => (
                    d.parse::<usize>().map_err(|_| bad(no, "bad block size"))?,
                    match *kind {
                        "real" => false,
                        "complex" => true,
                        _ => return Err(bad(no, "block kind must be real or complex")),
                    },
                ),
                _ => return Err(bad(no, "expected `block <d> real|complex`")),
            };
            let (no, l) = lines.expect()?;
            if l != "const" {
                return Err(bad(no, "expected `const`"));
            }
            let constant = read_herm(&mut lines, d, complex)?;
            let mut coeffs: Vec<Option<HermMatrix>> = alloc::vec![None; m];
            loop {
                let (no, l) = lines.expect()?;
                if l == "endblock" {
                    break;
                }
                let i: usize = keyword(no, l, "coeff")?
                    .parse()
                    .map_err(|_| bad(no, "bad coefficient index"))?;
                if i >= m {
                    return Err(bad(no, "coefficient index out of range"));
                }
                coeffs[i] = Some(read_herm(&mut lines, d, complex)?);
            }
            p.blocks.push(LmiBlock { constant, coeffs });
        } else if let Some(rest) = l.strip_prefix("scalar") {
            let v = numbers(no, rest)?;
            if v.len() != m + 1 {
                return Err(bad(no, "scalar constraint needs 1 + vars numbers"));
            }
            p.scalars.push(ScalarConstraint {
                constant: v[0],
                coeffs: v[1..].to_vec(),
            });
        } else {
            return Err(bad(no, "expected `block` or `scalar`"));
        }
    }
    p.validate()?;
    Ok(p)
}
