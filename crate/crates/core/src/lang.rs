//! Regular-expression syntax and brute-force language oracles.
//!
//! Concrete syntax: symbols are digits (or `{n}` for any index), `~` is the empty
//! word, `#` the empty language, `|` union, `*` Kleene star, juxtaposition
//! concatenation. Precedence is star > concatenation > union.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Symbol = usize;
pub type Word = Vec<Symbol>;

/// Largest dense enumeration accepted by the oracles (`d^N` words).
pub const DENSE_CAP: usize = 1 << 24;
/// Longest word length accepted by the enumeration oracle.
pub const MAX_ENUM_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    d: usize,
}

impl Alphabet {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet { d })
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn check(&self, symbol: Symbol) -> Result<()> {
        if symbol < self.d {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange { symbol, d: self.d })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regex {
    Symbol(Symbol),
    Epsilon,
    Empty,
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Regex::Symbol(_) | Regex::Epsilon | Regex::Empty => 1,
            Regex::Concat(cs) | Regex::Union(cs) => 1 + cs.iter().map(Regex::size).sum::<usize>(),
            Regex::Star(c) => 1 + c.size(),
        }
    }

    /// Largest symbol index mentioned, if any.
    pub fn max_symbol(&self) -> Option<Symbol> {
        match self {
            Regex::Symbol(a) => Some(*a),
            Regex::Epsilon | Regex::Empty => None,
            Regex::Concat(cs) | Regex::Union(cs) => cs.iter().filter_map(Regex::max_symbol).max(),
            Regex::Star(c) => c.max_symbol(),
        }
    }

    /// Checks the structural invariants: arities and symbol range.
    pub fn validate(&self, alphabet: Alphabet) -> Result<()> {
        match self {
            Regex::Symbol(a) => alphabet.check(*a),
            Regex::Epsilon | Regex::Empty => Ok(()),
            Regex::Concat(cs) | Regex::Union(cs) => {
                if cs.len() < 2 {
                    return Err(Error::Invalid("concat/union needs at least two children".into()));
                }
                cs.iter().try_for_each(|c| c.validate(alphabet))
            }
            Regex::Star(c) => c.validate(alphabet),
        }
    }
}

/// Infers the smallest alphabet that covers every symbol of `text` (at least 1).
pub fn infer_alphabet(text: &str) -> Result<Alphabet> {
    let ast = parse_regex(text, Alphabet { d: usize::MAX })?;
    Alphabet::new(ast.max_symbol().map_or(1, |m| m + 1))
}

pub fn parse_regex(text: &str, alphabet: Alphabet) -> Result<Regex> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, alphabet };
    p.skip_ws();
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(match p.src[p.pos] {
            b')' => "unbalanced ')'",
            _ => "unexpected character",
        }));
    }
    Ok(ast)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: Alphabet,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Regex> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            self.skip_ws();
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Regex::Union(terms) })
    }

    fn term(&mut self) -> Result<Regex> {
        let mut factors = Vec::new();
        while let Some(c) = self.peek() {
            if c == b'|' || c == b')' {
                break;
            }
            factors.push(self.factor()?);
        }
        match factors.len() {
            0 => Err(self.error("empty operand")),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(Regex::Concat(factors)),
        }
    }

    fn factor(&mut self) -> Result<Regex> {
        let mut node = self.atom()?;
        self.skip_ws();
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.skip_ws();
            node = Regex::Star(Box::new(node));
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Regex> {
        let start = self.pos;
        let node = match self.peek() {
            None => return Err(self.error("unexpected end of input")),
            Some(b'~') => {
                self.pos += 1;
                Regex::Epsilon
            }
            Some(b'#') => {
                self.pos += 1;
                Regex::Empty
            }
            Some(c) if c.is_ascii_digit() => {
                self.pos += 1;
                self.symbol((c - b'0') as usize, start)?
            }
            Some(b'{') => {
                self.pos += 1;
                let digits_start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if self.pos == digits_start {
                    return Err(self.error("expected symbol index"));
                }
                let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
                let value: usize = text
                    .parse()
                    .map_err(|_| Error::Syntax { offset: digits_start, message: "symbol index too large".into() })?;
                if self.peek() != Some(b'}') {
                    return Err(self.error("expected '}'"));
                }
                self.pos += 1;
                self.symbol(value, start)?
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("unbalanced '('"));
                }
                self.pos += 1;
                inner
            }
            Some(b'*') => return Err(self.error("star without operand")),
            Some(_) => return Err(self.error("unexpected character")),
        };
        self.skip_ws();
        Ok(node)
    }

    fn symbol(&self, value: usize, offset: usize) -> Result<Regex> {
        if value >= self.alphabet.size() {
            return Err(Error::Syntax {
                offset,
                message: format!("symbol {value} outside alphabet of size {}", self.alphabet.size()),
            });
        }
        Ok(Regex::Symbol(value))
    }
}

/// Pretty-printer inverse to [`parse_regex`].
pub fn render(ast: &Regex, alphabet: Alphabet) -> String {
    let mut out = String::new();
    render_into(ast, alphabet, &mut out);
    out
}

fn render_into(ast: &Regex, alphabet: Alphabet, out: &mut String) {
    match ast {
        Regex::Symbol(a) => {
            if alphabet.size() <= 10 {
                out.push(char::from(b'0' + *a as u8));
            } else {
                out.push_str(&format!("{{{a}}}"));
            }
        }
        Regex::Epsilon => out.push('~'),
        Regex::Empty => out.push('#'),
        Regex::Concat(cs) => {
            for c in cs {
                let wrap = matches!(c, Regex::Concat(_) | Regex::Union(_));
                render_wrapped(c, alphabet, wrap, out);
            }
        }
        Regex::Union(cs) => {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push('|');
                }
                render_wrapped(c, alphabet, matches!(c, Regex::Union(_)), out);
            }
        }
        Regex::Star(c) => {
            let wrap = matches!(**c, Regex::Concat(_) | Regex::Union(_));
            render_wrapped(c, alphabet, wrap, out);
            out.push('*');
        }
    }
}

fn render_wrapped(ast: &Regex, alphabet: Alphabet, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
    }
    render_into(ast, alphabet, out);
    if wrap {
        out.push(')');
    }
}

/// Membership by direct recursive matching with memoised split points.
pub fn membership(ast: &Regex, w: &[Symbol]) -> bool {
    let mut m = Matcher::new(ast, w);
    m.matches(0, 0, w.len())
}

/// Flattened AST so that memo keys can use node indices.
struct Matcher<'a> {
    nodes: Vec<&'a Regex>,
    children: Vec<Vec<usize>>,
    word: &'a [Symbol],
    memo: HashMap<(usize, usize, usize, usize), bool>,
}

impl<'a> Matcher<'a> {
    fn new(ast: &'a Regex, word: &'a [Symbol]) -> Self {
        let mut m = Matcher { nodes: Vec::new(), children: Vec::new(), word, memo: HashMap::new() };
        m.flatten(ast);
        m
    }

    fn flatten(&mut self, ast: &'a Regex) -> usize {
        let id = self.nodes.len();
        self.nodes.push(ast);
        self.children.push(Vec::new());
        let kids: Vec<usize> = match ast {
            Regex::Concat(cs) | Regex::Union(cs) => cs.iter().map(|c| self.flatten(c)).collect(),
            Regex::Star(c) => vec![self.flatten(c)],
            _ => Vec::new(),
        };
        self.children[id] = kids;
        id
    }

    /// Does `word[i..j]` belong to the language of node `n`?
    fn matches(&mut self, n: usize, i: usize, j: usize) -> bool {
        match self.nodes[n] {
            Regex::Symbol(a) => j == i + 1 && self.word[i] == *a,
            Regex::Epsilon => i == j,
            Regex::Empty => false,
            Regex::Union(_) => {
                let kids = self.children[n].clone();
                kids.into_iter().any(|c| self.matches(c, i, j))
            }
            Regex::Concat(_) => self.concat_from(n, 0, i, j),
            Regex::Star(_) => self.star(n, i, j),
        }
    }

    /// Does `word[i..j]` match children `k..` of concat node `n`?
    fn concat_from(&mut self, n: usize, k: usize, i: usize, j: usize) -> bool {
        let kids = &self.children[n];
        if k == kids.len() {
            return i == j;
        }
        let key = (n, k, i, j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let child = kids[k];
        let mut found = false;
        for split in i..=j {
            if self.matches(child, i, split) && self.concat_from(n, k + 1, split, j) {
                found = true;
                break;
            }
        }
        self.memo.insert(key, found);
        found
    }

    fn star(&mut self, n: usize, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        let key = (n, usize::MAX, i, j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let child = self.children[n][0];
        // Each iteration consumes at least one symbol, so the recursion is well founded.
        let mut found = false;
        for split in i + 1..=j {
            if self.matches(child, i, split) && self.star(n, split, j) {
                found = true;
                break;
            }
        }
        self.memo.insert(key, found);
        found
    }
}

/// Number of words of length `n`, or an error beyond the dense cap.
pub fn checked_word_count(d: usize, n: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= DENSE_CAP)
            .ok_or_else(|| Error::CapExceeded(format!("{d}^{n} exceeds {DENSE_CAP}")))?;
    }
    Ok(total)
}

/// Decodes a base-`d` index (most significant symbol first) into a word.
pub fn word_from_index(mut index: usize, d: usize, n: usize) -> Word {
    let mut w = vec![0; n];
    for slot in w.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    w
}

pub fn word_index(w: &[Symbol], d: usize) -> usize {
    w.iter().fold(0, |acc, &a| acc * d + a)
}

/// Every word of length `n` in lexicographic order.
pub fn all_words(d: usize, n: usize) -> Result<impl Iterator<Item = Word>> {
    let count = checked_word_count(d, n)?;
    Ok((0..count).map(move |i| word_from_index(i, d, n)))
}

/// Brute-force oracle: the length-`n` words of the language, by membership tests.
pub fn enumerate_words(ast: &Regex, alphabet: Alphabet, n: usize) -> Result<BTreeSet<Word>> {
    if n > MAX_ENUM_LEN {
        return Err(Error::CapExceeded(format!("word length {n} exceeds {MAX_ENUM_LEN}")));
    }
    Ok(all_words(alphabet.size(), n)?.filter(|w| membership(ast, w)).collect())
}

/// Renders a word as digits (or `{n}` tokens when `d > 10`); ε renders as `~`.
pub fn format_word(w: &[Symbol], d: usize) -> String {
    if w.is_empty() {
        return "~".to_string();
    }
    w.iter()
        .map(|&a| if d <= 10 { a.to_string() } else { format!("{{{a}}}") })
        .collect()
}

/// Parses digit words as used in examples ("" or "~" is ε).
pub fn parse_word(text: &str, alphabet: Alphabet) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() || text == "~" {
        return Ok(Vec::new());
    }
    match parse_regex(text, alphabet)? {
        Regex::Symbol(a) => Ok(vec![a]),
        Regex::Concat(cs) => cs
            .into_iter()
            .map(|c| match c {
                Regex::Symbol(a) => Ok(a),
                _ => Err(Error::Invalid(format!("not a plain word: {text}"))),
            })
            .collect(),
        _ => Err(Error::Invalid(format!("not a plain word: {text}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(d: usize) -> Alphabet {
        Alphabet::new(d).unwrap()
    }

    fn words(list: &[&str]) -> BTreeSet<Word> {
        list.iter().map(|s| s.bytes().map(|b| (b - b'0') as usize).collect()).collect()
    }

    #[test]
    fn parses_exactly_one_one() {
        let ast = parse_regex("0*10*", ab(2)).unwrap();
        let star0 = Regex::Star(Box::new(Regex::Symbol(0)));
        assert_eq!(ast, Regex::Concat(vec![star0.clone(), Regex::Symbol(1), star0]));
    }

    #[test]
    fn parses_epsilon_and_empty() {
        assert_eq!(parse_regex("~", ab(2)).unwrap(), Regex::Epsilon);
        assert_eq!(parse_regex("#", ab(2)).unwrap(), Regex::Empty);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse_regex("(0", ab(2)).unwrap_err();
        assert!(matches!(err, Error::Syntax { offset: 2, .. }), "{err:?}");
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_regex("0)", ab(2)), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_regex("2", ab(2)), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_regex("0|", ab(2)), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_regex("()", ab(2)), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_regex("", ab(2)), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_regex("*", ab(2)), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_regex("{12", ab(20)), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn braces_and_precedence() {
        let ast = parse_regex("{11}|0{3}*", ab(12)).unwrap();
        assert_eq!(
            ast,
            Regex::Union(vec![
                Regex::Symbol(11),
                Regex::Concat(vec![Regex::Symbol(0), Regex::Star(Box::new(Regex::Symbol(3)))]),
            ])
        );
        assert_eq!(render(&ast, ab(12)), "{11}|{0}{3}*");
    }

    #[test]
    fn enumerate_examples() {
        let e = |t: &str, n| enumerate_words(&parse_regex(t, ab(2)).unwrap(), ab(2), n).unwrap();
        assert_eq!(e("0*|1*", 2), words(&["00", "11"]));
        assert_eq!(e("0*10*", 3), words(&["100", "010", "001"]));
        assert_eq!(e("1*(011*)*", 3), words(&["011", "101", "111"]));
    }

    #[test]
    fn membership_examples() {
        let ast = parse_regex("0*10*", ab(2)).unwrap();
        assert!(membership(&ast, &[0, 1, 0]));
        assert!(!membership(&ast, &[0, 1, 1]));
        let f2 = parse_regex("1*(011*)*", ab(2)).unwrap();
        assert!(membership(&f2, &[0, 1]));
        assert!(!membership(&f2, &[1, 0]));
    }

    #[test]
    fn enumeration_cap() {
        let ast = parse_regex("0*", ab(2)).unwrap();
        assert!(matches!(enumerate_words(&ast, ab(2), 17), Err(Error::CapExceeded(_))));
        assert!(matches!(enumerate_words(&ast, ab(5), 11), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn word_helpers() {
        assert_eq!(word_from_index(5, 2, 4), vec![0, 1, 0, 1]);
        assert_eq!(word_index(&[0, 1, 0, 1], 2), 5);
        assert_eq!(parse_word("0120", ab(3)).unwrap(), vec![0, 1, 2, 0]);
        assert_eq!(parse_word("~", ab(3)).unwrap(), Vec::<usize>::new());
        assert_eq!(format_word(&[], 2), "~");
        assert_eq!(infer_alphabet("0*30").unwrap().size(), 4);
    }
}
