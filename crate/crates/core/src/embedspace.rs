//! Word-embedding spaces in word2vec text format and bilingual lexicon
//! induction by nearest cosine neighbour.
//!
//! Rows are L2-normalized at load and stored as `f32`; all similarity
//! arithmetic runs in `f64` through [`dot`], so the blocked parallel kernel
//! and the naive scan produce identical scores and identical argmaxes.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::lexicon::BilingualLexicon;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    language: String,
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major, `vocab.len() * dim`, unit rows.
    vectors: Vec<f32>,
    dim: usize,
}

/// Cosine similarity of two raw vectors.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::Degenerate("cosine of a zero vector".into()));
    }
    Ok((uv / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

/// Dot product of two stored rows, accumulated in `f64` in a fixed order.
#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += f64::from(a[j]) * f64::from(b[j]);
        acc[1] += f64::from(a[j + 1]) * f64::from(b[j + 1]);
        acc[2] += f64::from(a[j + 2]) * f64::from(b[j + 2]);
        acc[3] += f64::from(a[j + 3]) * f64::from(b[j + 3]);
    }
    let mut tail = 0.0;
    for j in chunks * 4..a.len() {
        tail += f64::from(a[j]) * f64::from(b[j]);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl EmbeddingSpace {
    /// Builds a space from `(term, vector)` rows. Duplicate terms keep the
    /// first row; a zero row or a row of the wrong length is an error.
    pub fn from_rows<I, S>(language: &str, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut space = Self {
            language: language.to_string(),
            vocab: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
            dim: 0,
        };
        for (term, v) in rows {
            let term = term.into();
            if space.vocab.is_empty() {
                if v.is_empty() {
                    return Err(Error::Invalid("embedding dimension must be positive".into()));
                }
                space.dim = v.len();
            }
            space.push(term, &v)?;
        }
        if space.vocab.is_empty() {
            return Err(Error::Empty {
                origin: language.to_string(),
            });
        }
        Ok(space)
    }

    fn push(&mut self, term: String, v: &[f64]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: v.len(),
            });
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector { term });
        }
        if self.index.contains_key(&term) {
            return Ok(false);
        }
        self.index.insert(term.clone(), self.vocab.len());
        self.vocab.push(term);
        self.vectors.extend(v.iter().map(|x| (x / norm) as f32));
        Ok(true)
    }

    /// Loads a word2vec text file. A first line holding exactly two integers
    /// is treated as a `count dim` header. At most `limit` distinct terms are
    /// read, from the top of the file.
    pub fn load(path: impl AsRef<Path>, language: &str, limit: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), &path.display().to_string(), language, limit)
    }

    pub fn from_reader<R: BufRead>(
        reader: R,
        origin: &str,
        language: &str,
        limit: Option<usize>,
    ) -> Result<Self> {
        let mut space = Self {
            language: language.to_string(),
            vocab: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
            dim: 0,
        };
        let limit = limit.unwrap_or(usize::MAX);
        let mut values = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            if space.vocab.len() >= limit {
                break;
            }
            let lineno = i + 1;
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(' ').filter(|f| !f.is_empty());
            let term = fields.next().unwrap_or_default();
            let rest: Vec<&str> = fields.collect();
            if lineno == 1 && rest.len() == 1 && is_count(term) && is_count(rest[0]) {
                continue;
            }
            if space.dim == 0 {
                if rest.is_empty() {
                    return Err(Error::parse(origin, lineno, "line has no vector components"));
                }
                space.dim = rest.len();
            }
            if rest.len() != space.dim {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("expected {} components, found {}", space.dim, rest.len()),
                ));
            }
            values.clear();
            for f in &rest {
                let x: f64 = f.parse().map_err(|_| {
                    Error::parse(origin, lineno, format!("bad vector component {f:?}"))
                })?;
                values.push(x);
            }
            space.push(term.to_string(), &values).map_err(|e| match e {
                Error::ZeroVector { term } => Error::parse(
                    origin,
                    lineno,
                    format!("zero-norm vector for term {term:?}"),
                ),
                other => other,
            })?;
        }
        if space.vocab.is_empty() {
            return Err(Error::Empty {
                origin: origin.to_string(),
            });
        }
        Ok(space)
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Unit-normalized row `i`.
    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    fn check_aligned(&self, other: &EmbeddingSpace) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

fn is_count(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborResult {
    pub term: String,
    /// Sorted by score descending, then by target index.
    pub neighbors: Vec<(String, f64)>,
}

/// Top-`k` targets for `term` by cosine. Ties go to the lower target index.
pub fn nearest_neighbors(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    term: &str,
    k: usize,
) -> Result<NeighborResult> {
    src.check_aligned(tgt)?;
    let i = src
        .index_of(term)
        .ok_or_else(|| Error::NotFound(term.to_string()))?;
    let query = src.row(i);
    let mut scored: Vec<(usize, f64)> = (0..tgt.len()).map(|j| (j, dot(query, tgt.row(j)))).collect();
    let k = k.min(scored.len());
    let by_rank = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if k < scored.len() && k > 0 {
        scored.select_nth_unstable_by(k - 1, by_rank);
    }
    scored.truncate(k);
    scored.sort_by(by_rank);
    Ok(NeighborResult {
        term: term.to_string(),
        neighbors: scored
            .into_iter()
            .map(|(j, s)| (tgt.vocab[j].clone(), s.clamp(-1.0, 1.0)))
            .collect(),
    })
}

/// Nearest target index for every source row, scanning targets one at a
/// time. Reference implementation for [`induce_pairs`].
pub fn induce_pairs_naive(src: &EmbeddingSpace, tgt: &EmbeddingSpace) -> Result<Vec<usize>> {
    src.check_aligned(tgt)?;
    Ok((0..src.len())
        .map(|i| {
            let row = src.row(i);
            let mut best = (0usize, f64::NEG_INFINITY);
            for j in 0..tgt.len() {
                let s = dot(row, tgt.row(j));
                if s > best.1 {
                    best = (j, s);
                }
            }
            best.0
        })
        .collect())
}

const SRC_BLOCK: usize = 64;
const TGT_BLOCK: usize = 512;

/// Nearest target index for every source row. Source rows are split into
/// blocks processed in parallel; within a block, targets are visited in
/// tiles so a tile stays in cache while the block's rows are scored against
/// it. Scores and tie-breaks match [`induce_pairs_naive`] exactly.
pub fn induce_pairs(src: &EmbeddingSpace, tgt: &EmbeddingSpace) -> Result<Vec<usize>> {
    src.check_aligned(tgt)?;
    let mut best = vec![(0usize, f64::NEG_INFINITY); src.len()];
    best.par_chunks_mut(SRC_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let base = block * SRC_BLOCK;
            for tile in (0..tgt.len()).step_by(TGT_BLOCK) {
                let tile_end = (tile + TGT_BLOCK).min(tgt.len());
                for (r, slot) in out.iter_mut().enumerate() {
                    let row = src.row(base + r);
                    for j in tile..tile_end {
                        let s = dot(row, tgt.row(j));
                        // tiles are visited in ascending order, so strict >
                        // keeps the lowest index on ties
                        if s > slot.1 {
                            *slot = (j, s);
                        }
                    }
                }
            }
        });
    Ok(best.into_iter().map(|(j, _)| j).collect())
}

/// Maps every source term to its nearest target term.
pub fn induce_lexicon(src: &EmbeddingSpace, tgt: &EmbeddingSpace) -> Result<BilingualLexicon> {
    let pairs = induce_pairs(src, tgt)?;
    let mut lex = BilingualLexicon::new(src.language(), tgt.language());
    for (i, j) in pairs.into_iter().enumerate() {
        lex.insert(&src.vocab[i], &tgt.vocab[j])?;
    }
    Ok(lex)
}

/// Writes induced pairs as `source<TAB>target`, one line per source term.
pub fn write_pairs<W: Write>(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    pairs: &[usize],
    mut out: W,
) -> Result<()> {
    for (i, &j) in pairs.iter().enumerate() {
        writeln!(out, "{}\t{}", src.vocab[i], tgt.vocab[j])?;
    }
    Ok(())
}
