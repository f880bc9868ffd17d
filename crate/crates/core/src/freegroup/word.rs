use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    BadGenerator { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
}

/// A word in the free group on generators `x1..xn`.
///
/// Letters are stored as nonzero integers: `+g` is the generator `xg`, `-g`
/// its inverse. Words are not forced into reduced form; [`FreeWord::reduce`]
/// computes the unique reduced representative, and all algebraic operations
/// return reduced output. Two words are equal as group elements iff their
/// reduced forms are equal letter for letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn empty(rank: usize) -> Self {
        FreeWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self, WordError> {
        if index == 0 || index > rank {
            return Err(WordError::BadGenerator { index, rank });
        }
        Ok(FreeWord { rank, letters: vec![index as i32] })
    }

    /// Builds a word from `(generator, exponent)` letters, exponent `+1`/`-1`.
    pub fn from_letters<I>(rank: usize, letters: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = (usize, i8)>,
    {
        let mut out = Vec::new();
        for (gen, exp) in letters {
            if gen == 0 || gen > rank {
                return Err(WordError::BadGenerator { index: gen, rank });
            }
            debug_assert!(exp == 1 || exp == -1);
            out.push(if exp >= 0 { gen as i32 } else { -(gen as i32) });
        }
        Ok(FreeWord { rank, letters: out })
    }

    pub(crate) fn from_raw(rank: usize, letters: Vec<i32>) -> Self {
        debug_assert!(letters.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= rank));
        FreeWord { rank, letters }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters as `(generator, exponent)` pairs in word order.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.letters.iter().map(|&l| (l.unsigned_abs() as usize, if l > 0 { 1 } else { -1 }))
    }

    pub(crate) fn raw_letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != -w[1])
    }

    /// The unique reduced form: no adjacent `x x^-1` pair survives.
    pub fn reduce(&self) -> FreeWord {
        let mut stack: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        FreeWord { rank: self.rank, letters: stack }
    }

    /// Concatenation followed by reduction.
    pub fn multiply(&self, other: &FreeWord) -> Result<FreeWord, WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch { left: self.rank, right: other.rank });
        }
        let mut letters = Vec::with_capacity(self.letters.len() + other.letters.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Ok(FreeWord { rank: self.rank, letters }.reduce())
    }

    /// Formal inverse (letters reversed and negated), reduced.
    pub fn invert(&self) -> FreeWord {
        let letters: Vec<i32> = self.letters.iter().rev().map(|&l| -l).collect();
        let w = FreeWord { rank: self.rank, letters };
        if self.is_reduced() {
            w
        } else {
            w.reduce()
        }
    }

    /// `u v u^-1 v^-1`, reduced.
    pub fn commutator(&self, other: &FreeWord) -> Result<FreeWord, WordError> {
        let uv = self.multiply(other)?;
        let uv_ui = uv.multiply(&self.invert())?;
        uv_ui.multiply(&other.invert())
    }

    /// `g w g^-1`, reduced.
    pub fn conjugate_by(&self, g: &FreeWord) -> Result<FreeWord, WordError> {
        g.multiply(self)?.multiply(&g.invert())
    }

    pub fn pow(&self, exp: i64) -> FreeWord {
        let base = if exp >= 0 { self.clone() } else { self.invert() };
        let mut out = FreeWord::empty(self.rank);
        for _ in 0..exp.unsigned_abs() {
            out = out.multiply(&base).expect("same rank");
        }
        out
    }

    /// Exponent sum of each generator: the image in the free abelianization.
    pub fn abelianization(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for &l in &self.letters {
            sums[l.unsigned_abs() as usize - 1] += if l > 0 { 1 } else { -1 };
        }
        sums
    }

    /// Parses word syntax: generators `x1..xn`, inverse suffix `^-1` (any
    /// integer exponent is accepted), juxtaposition by whitespace, and
    /// commutator brackets `[u,v]`. `1` denotes the empty word.
    ///
    /// With `rank = None` the rank is inferred as the largest index used.
    pub fn parse(input: &str, rank: Option<usize>) -> Result<FreeWord, WordError> {
        let mut parser = Parser { bytes: input.as_bytes(), pos: 0 };
        parser.skip_ws();
        let items = parser.sequence(0)?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(WordError::Parse { at: parser.pos, message: "unexpected trailing input".into() });
        }
        let max_gen = items.iter().map(|&l: &i32| l.unsigned_abs() as usize).max().unwrap_or(0);
        let rank = match rank {
            Some(r) => {
                if max_gen > r {
                    return Err(WordError::BadGenerator { index: max_gen, rank: r });
                }
                r
            }
            None => max_gen,
        };
        Ok(FreeWord { rank, letters: items })
    }

    /// Renders with a custom generator prefix, e.g. `a` for arc generators.
    pub fn display_with(&self, prefix: &str) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1usize;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            let exp = if l > 0 { run as i64 } else { -(run as i64) };
            if exp == 1 {
                out.push_str(&format!("{}{}", prefix, l.unsigned_abs()));
            } else {
                out.push_str(&format!("{}{}^{}", prefix, l.unsigned_abs(), exp));
            }
            i += run;
        }
        out
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, message: &str) -> WordError {
        WordError::Parse { at: self.pos, message: message.into() }
    }

    /// Parses a whitespace-juxtaposed sequence of atoms until `)`/`]`/`,`/end.
    fn sequence(&mut self, depth: usize) -> Result<Vec<i32>, WordError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                None => break,
                Some(b']') | Some(b',') if depth > 0 => break,
                Some(_) => {
                    let atom = self.atom(depth)?;
                    out.extend(atom);
                }
            }
        }
        Ok(out)
    }

    fn atom(&mut self, depth: usize) -> Result<Vec<i32>, WordError> {
        let base: Vec<i32> = match self.bytes.get(self.pos) {
            Some(b'[') => {
                self.pos += 1;
                let u = self.sequence(depth + 1)?;
                self.skip_ws();
                if self.bytes.get(self.pos) != Some(&b',') {
                    return Err(self.err("expected ',' in commutator"));
                }
                self.pos += 1;
                let v = self.sequence(depth + 1)?;
                self.skip_ws();
                if self.bytes.get(self.pos) != Some(&b']') {
                    return Err(self.err("expected ']' closing commutator"));
                }
                self.pos += 1;
                let mut w = Vec::with_capacity(2 * (u.len() + v.len()));
                w.extend(&u);
                w.extend(&v);
                w.extend(u.iter().rev().map(|l| -l));
                w.extend(v.iter().rev().map(|l| -l));
                w
            }
            Some(b'x') => {
                self.pos += 1;
                let idx = self.integer()?;
                if idx <= 0 {
                    return Err(self.err("generator index must be positive"));
                }
                vec![idx as i32]
            }
            Some(b'1') => {
                self.pos += 1;
                Vec::new()
            }
            _ => return Err(self.err("expected generator, '[', or '1'")),
        };
        if self.bytes.get(self.pos) == Some(&b'^') {
            self.pos += 1;
            let exp = self.integer()?;
            let mut out = Vec::with_capacity(base.len() * exp.unsigned_abs() as usize);
            if exp >= 0 {
                for _ in 0..exp {
                    out.extend(&base);
                }
            } else {
                let inv: Vec<i32> = base.iter().rev().map(|l| -l).collect();
                for _ in 0..(-exp) {
                    out.extend(&inv);
                }
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start || (self.pos == start + 1 && self.bytes[start] == b'-') {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }
}
