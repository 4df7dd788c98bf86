//! Binary `[n k d]` linear codes, their duals, and syndrome/coset tables.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{mat_vec_mul, standard_form, BitMatrix, BitVector};

/// Largest block length for which the minimum distance is found by scanning codewords.
pub const DISTANCE_SCAN_LIMIT: usize = 24;
/// Default block-length guard for exhaustive syndrome tables.
pub const TABLE_LIMIT: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearCode {
    n: usize,
    k: usize,
    d: Option<usize>,
    parity_check: BitMatrix,
    generator: BitMatrix,
    label: String,
}

impl LinearCode {
    /// `[n 1 n]` repetition code. Parity rows check adjacent pairs.
    pub fn repetition(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "repetition code needs n >= 2, got {n}"
            )));
        }
        let mut h = BitMatrix::zeros(n - 1, n);
        for r in 0..n - 1 {
            h.set(r, r, true);
            h.set(r, r + 1, true);
        }
        let g = BitMatrix::from_columns(&[BitVector::ones(n)], n)?;
        Ok(Self {
            n,
            k: 1,
            d: Some(n),
            parity_check: h,
            generator: g,
            label: format!("rep:{n}"),
        })
    }

    /// `[m m-1 2]` single-parity-check code.
    pub fn single_parity(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "single-parity code needs m >= 2, got {m}"
            )));
        }
        let h = BitMatrix::from_rows(vec![BitVector::ones(m)], m)?;
        let mut code = Self::from_parity_matrix(h, Some(2))?;
        code.label = format!("spc:{m}");
        Ok(code)
    }

    /// `[n n 1]` code with an empty parity check: no advantage distillation,
    /// plain one-way post-processing.
    pub fn full(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("full code needs n >= 1".into()));
        }
        Ok(Self {
            n,
            k: n,
            d: Some(1),
            parity_check: BitMatrix::zeros(0, n),
            generator: BitMatrix::identity(n),
            label: format!("full:{n}"),
        })
    }

    /// The `[7 4 3]` Hamming code in the systematic layout `[I | A']`.
    pub fn hamming743() -> Self {
        let h = BitMatrix::parse_rows(&["1001101", "0101011", "0010111"]).expect("static matrix");
        let mut code = Self::from_parity_matrix(h, None).expect("full-rank static matrix");
        code.label = "hamming743".into();
        code
    }

    /// Builds a code from its parity check matrix. The generator is a kernel
    /// basis; `d` is computed by codeword scan unless declared.
    pub fn from_parity_matrix(h: BitMatrix, declared_d: Option<usize>) -> Result<Self> {
        let n = h.cols();
        if n == 0 {
            return Err(Error::InvalidParameter("code with zero block length".into()));
        }
        let sf = standard_form(&h);
        if sf.rank < h.rows() {
            return Err(Error::RankDeficient {
                rank: sf.rank,
                rows: h.rows(),
            });
        }
        let k = n - sf.rank;
        let a = sf.a_block();
        // canonical kernel vectors are (x, Ax); undo the column permutation
        let mut columns = Vec::with_capacity(k);
        for x in 0..k {
            let mut v = BitVector::zeros(n);
            v.set(sf.column_permutation[x], true);
            for r in 0..sf.rank {
                if a.get(r, x) {
                    v.set(sf.column_permutation[k + r], true);
                }
            }
            columns.push(v);
        }
        let g = BitMatrix::from_columns(&columns, n)?;
        debug_assert!(h.mul(&g)?.is_zero());
        let mut code = Self {
            n,
            k,
            d: None,
            parity_check: h,
            generator: g,
            label: String::new(),
        };
        code.d = code.resolve_distance(declared_d)?;
        code.label = code.bracket_name();
        Ok(code)
    }

    fn resolve_distance(&self, declared: Option<usize>) -> Result<Option<usize>> {
        if self.n > DISTANCE_SCAN_LIMIT {
            return match declared {
                Some(d) => Ok(Some(d)),
                None => Err(Error::SizeLimit {
                    what: "n (distance scan without declared d)",
                    value: self.n,
                    limit: DISTANCE_SCAN_LIMIT,
                }),
            };
        }
        let computed = self.minimum_distance();
        match (declared, computed) {
            (Some(d), Some(c)) if d != c => Err(Error::InvalidParameter(format!(
                "declared distance {d} but the code has distance {c}"
            ))),
            _ => Ok(computed),
        }
    }

    /// Minimum nonzero codeword weight; `None` for the zero-dimensional code.
    fn minimum_distance(&self) -> Option<usize> {
        let cols: Vec<u64> = (0..self.k).map(|c| self.generator.column(c).to_pattern()).collect();
        // Gray-code walk over all messages
        let mut word = 0u64;
        let mut best: Option<usize> = None;
        for step in 1u64..(1u64 << self.k) {
            word ^= cols[step.trailing_zeros() as usize];
            let w = word.count_ones() as usize;
            best = Some(best.map_or(w, |b| b.min(w)));
        }
        best
    }

    /// Dual code: parity check `Gᵀ`, generator `Hᵀ`.
    pub fn dual(&self) -> LinearCode {
        let mut dual = LinearCode {
            n: self.n,
            k: self.n - self.k,
            d: None,
            parity_check: self.generator.transpose(),
            generator: self.parity_check.transpose(),
            label: format!("dual({})", self.label),
        };
        if self.n <= DISTANCE_SCAN_LIMIT {
            dual.d = dual.minimum_distance();
        }
        dual
    }

    /// Parses the text code format: `n k`, optional `d <value>`, then the
    /// `n-k` rows of `H`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty code file".into(),
        })?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let parse_num = |s: &str, line: usize| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("expected a nonnegative integer, found {s:?}"),
            })
        };
        if nums.len() != 2 {
            return Err(Error::Parse {
                line: hl,
                message: "header must be \"n k\"".into(),
            });
        }
        let (n, k) = (parse_num(nums[0], hl)?, parse_num(nums[1], hl)?);
        if n == 0 || k > n {
            return Err(Error::Parse {
                line: hl,
                message: format!("invalid dimensions n={n}, k={k}"),
            });
        }
        let mut declared_d = None;
        if let Some(&(dl, l)) = lines.peek() {
            if let Some(rest) = l.strip_prefix('d') {
                if rest.starts_with(char::is_whitespace) {
                    declared_d = Some(parse_num(rest.trim(), dl)?);
                    lines.next();
                }
            }
        }
        let mut rows = Vec::with_capacity(n - k);
        let mut last_line = hl;
        for (line, l) in lines {
            last_line = line;
            if rows.len() == n - k {
                return Err(Error::Parse {
                    line,
                    message: format!("more than n-k = {} parity rows", n - k),
                });
            }
            if l.chars().count() != n {
                return Err(Error::Parse {
                    line,
                    message: format!("row has {} entries, expected {n}", l.chars().count()),
                });
            }
            let row: BitVector = l.parse().map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse { line, message },
                other => other,
            })?;
            rows.push(row);
        }
        if rows.len() != n - k {
            return Err(Error::Parse {
                line: last_line,
                message: format!("found {} parity rows, expected {}", rows.len(), n - k),
            });
        }
        let h = BitMatrix::from_rows(rows, n)?;
        Self::from_parity_matrix(h, declared_d).map_err(|e| match e {
            Error::RankDeficient { .. } => Error::Parse {
                line: hl,
                message: format!("parity check matrix is not full rank: {e}"),
            },
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut code = Self::parse(&text)?;
        code.label = format!("file:{}", path.display());
        Ok(code)
    }

    /// Resolves a selector: `rep:N`, `spc:M`, `full:N`, `hamming743`, `file:PATH`.
    pub fn from_selector(selector: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown code selector {selector:?}"));
        if selector == "hamming743" {
            return Ok(Self::hamming743());
        }
        let (kind, arg) = selector.split_once(':').ok_or_else(bad)?;
        let num = || arg.parse::<usize>().map_err(|_| bad());
        match kind {
            "rep" => Self::repetition(num()?),
            "spc" => Self::single_parity(num()?),
            "full" => Self::full(num()?),
            "file" => Self::load(Path::new(arg)),
            _ => Err(bad()),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> Option<usize> {
        self.d
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `[n k d]`, with `?` for an unknown distance.
    pub fn bracket_name(&self) -> String {
        match self.d {
            Some(d) => format!("[{} {} {}]", self.n, self.k, d),
            None => format!("[{} {} ?]", self.n, self.k),
        }
    }

    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        mat_vec_mul(&self.generator, message)
    }

    pub fn syndrome(&self, pattern: &BitVector) -> Result<BitVector> {
        mat_vec_mul(&self.parity_check, pattern)
    }

    /// All `2^k` codewords in message order.
    pub fn codewords(&self) -> Result<Vec<BitVector>> {
        if self.k > DISTANCE_SCAN_LIMIT {
            return Err(Error::SizeLimit {
                what: "k",
                value: self.k,
                limit: DISTANCE_SCAN_LIMIT,
            });
        }
        (0..1u64 << self.k)
            .map(|x| self.encode(&BitVector::from_pattern(x, self.k)))
            .collect()
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.label, self.bracket_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyndromeKind {
    /// `H e` over bit-error patterns.
    Bit,
    /// `Gᵀ e` over phase-error patterns.
    Phase,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeTable {
    pub kind: SyndromeKind,
    pub syndromes: Vec<BitVector>,
    /// `cosets[j]` lists the patterns with syndrome `syndromes[j]`, minimum
    /// weight first, ties in lexicographic order.
    pub cosets: Vec<Vec<BitVector>>,
}

/// Integer-pattern form of a syndrome table, used by the enumerators.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    /// Syndrome index (ascending syndrome value) of every pattern.
    pub syndrome_of: Vec<u32>,
    /// Position of every pattern inside its coset.
    pub position_of: Vec<u32>,
    pub cosets: Vec<Vec<u64>>,
    pub syndrome_len: usize,
}

/// Syndrome of an integer pattern under the matrix whose rows are `masks`.
pub(crate) fn pattern_syndrome(masks: &[u64], pattern: u64) -> u64 {
    masks
        .iter()
        .fold(0u64, |s, m| (s << 1) | ((m & pattern).count_ones() & 1) as u64)
}

pub(crate) fn partition(m: &BitMatrix) -> Partition {
    let n = m.cols();
    let masks: Vec<u64> = (0..m.rows()).map(|r| m.row_pattern(r)).collect();
    let rank = m.rank();
    // syndromes live in the column space; for full-row-rank m this is everything
    let syndrome_count = 1usize << rank;
    let mut by_value: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut slot = std::collections::HashMap::with_capacity(syndrome_count);
    for e in 0..(1u64 << n) {
        let s = pattern_syndrome(&masks, e);
        let idx = *slot.entry(s).or_insert_with(|| {
            by_value.push((s, Vec::new()));
            by_value.len() - 1
        });
        by_value[idx].1.push(e);
    }
    by_value.sort_by_key(|(s, _)| *s);
    let mut syndrome_of = vec![0u32; 1 << n];
    let mut position_of = vec![0u32; 1 << n];
    let mut cosets = Vec::with_capacity(by_value.len());
    for (j, (_, mut coset)) in by_value.into_iter().enumerate() {
        coset.sort_by_key(|&e| (e.count_ones(), e));
        for (i, &e) in coset.iter().enumerate() {
            syndrome_of[e as usize] = j as u32;
            position_of[e as usize] = i as u32;
        }
        cosets.push(coset);
    }
    Partition {
        syndrome_of,
        position_of,
        cosets,
        syndrome_len: m.rows(),
    }
}

impl Partition {
    pub fn syndrome_vector(&self, masks_matrix: &BitMatrix, j: usize) -> BitVector {
        let e = self.cosets[j][0];
        let masks: Vec<u64> = (0..masks_matrix.rows()).map(|r| masks_matrix.row_pattern(r)).collect();
        BitVector::from_pattern(pattern_syndrome(&masks, e), self.syndrome_len)
    }
}

pub(crate) fn check_table_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit {
            what: "n",
            value: n,
            limit,
        });
    }
    Ok(())
}

/// Complete coset partition of `{0,1}^n` by bit (`H e`) or phase (`Gᵀ e`) syndrome.
pub fn syndrome_table(code: &LinearCode, kind: SyndromeKind) -> Result<SyndromeTable> {
    syndrome_table_with_limit(code, kind, TABLE_LIMIT)
}

pub fn syndrome_table_with_limit(code: &LinearCode, kind: SyndromeKind, limit: usize) -> Result<SyndromeTable> {
    check_table_size(code.n, limit)?;
    let m = match kind {
        SyndromeKind::Bit => code.parity_check.clone(),
        SyndromeKind::Phase => code.generator.transpose(),
    };
    let part = partition(&m);
    let n = code.n;
    Ok(SyndromeTable {
        kind,
        syndromes: (0..part.cosets.len()).map(|j| part.syndrome_vector(&m, j)).collect(),
        cosets: part
            .cosets
            .iter()
            .map(|c| c.iter().map(|&e| BitVector::from_pattern(e, n)).collect())
            .collect(),
    })
}
