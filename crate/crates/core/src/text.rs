//! Line-oriented text formats for handlebodies, disk-bundle tables,
//! decorated modules and bare forms.
//!
//! Every format starts with a versioned header, ignores blank lines and
//! `#` comments, and has a canonical rendering that parses back to the
//! same value. Parse errors carry 1-based line and column numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::form::{DecoratedModule, GTable, OrderedValue};
use crate::genus::DiskBundleTable;
use crate::handlebody::{Handlebody2, SumKind, Tag, TwoHandle};
use crate::legendrian::FrontCounts;
use crate::linalg::IntMatrix;

struct Line<'a> {
    no: usize,
    toks: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn col(&self, i: usize) -> usize {
        self.toks.get(i).map_or_else(|| self.end_col(), |t| t.0)
    }

    fn end_col(&self) -> usize {
        self.toks.last().map_or(1, |(c, s)| c + s.chars().count())
    }

    fn err(&self, i: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.no,
            column: self.col(i),
            message: message.into(),
        }
    }

    fn tok(&self, i: usize, what: &str) -> Result<&'a str> {
        self.toks
            .get(i)
            .map(|t| t.1)
            .ok_or_else(|| self.err(i, format!("missing {what}")))
    }

    fn parse<T: FromStr>(&self, i: usize, what: &str) -> Result<T> {
        let s = self.tok(i, what)?;
        s.parse()
            .map_err(|_| self.err(i, format!("invalid {what} {s:?}")))
    }

    /// Value of a `key=value` token.
    fn field(&self, i: usize, key: &str) -> Result<&'a str> {
        let s = self.tok(i, &format!("{key}="))?;
        s.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| self.err(i, format!("expected {key}=, found {s:?}")))
    }

    fn parse_field<T: FromStr>(&self, i: usize, key: &str) -> Result<T> {
        let s = self.field(i, key)?;
        s.parse()
            .map_err(|_| self.err(i, format!("invalid value {s:?} for {key}")))
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.toks.len() > n {
            return Err(self.err(n, format!("unexpected token {:?}", self.toks[n].1)));
        }
        Ok(())
    }
}

fn significant_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let mut toks = Vec::new();
            let mut start = None;
            for (ci, (bi, ch)) in content.char_indices().enumerate() {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some((ci, bi)),
                    (true, Some((c0, b0))) => {
                        toks.push((c0 + 1, &content[b0..bi]));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some((c0, b0)) = start {
                toks.push((c0 + 1, &content[b0..]));
            }
            (!toks.is_empty()).then_some(Line { no: i + 1, toks })
        })
        .collect()
}

fn check_header<'a>(lines: &'a [Line<'a>], kind: &str, optional: bool) -> Result<&'a [Line<'a>]> {
    match lines.first() {
        Some(l) if l.toks[0].1 == kind => {
            if l.toks.get(1).map(|t| t.1) != Some("v1") {
                return Err(l.err(1, format!("unsupported {kind} format version; expected v1")));
            }
            l.expect_len(2)?;
            Ok(&lines[1..])
        }
        _ if optional => Ok(lines),
        Some(l) => Err(l.err(0, format!("expected header \"{kind} v1\""))),
        None => Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("empty input; expected header \"{kind} v1\""),
        }),
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

fn parse_tag(l: &Line<'_>) -> Result<Tag> {
    let kind = l.tok(1, "tag kind")?;
    let tag = match kind {
        "cork" => {
            l.expect_len(5)?;
            Tag::Cork {
                r: l.parse_field(2, "r")?,
                s: l.parse_field(3, "s")?,
                m: l.parse_field(4, "m")?,
            }
        }
        "wminus" | "wplus" => {
            l.expect_len(4)?;
            let target = l.parse_field(2, "target")?;
            let p = l.parse_field(3, "p")?;
            if kind == "wminus" {
                Tag::WMinus { target, p }
            } else {
                Tag::WPlus { target, p }
            }
        }
        "one_handle" => {
            l.expect_len(2)?;
            Tag::OneHandle
        }
        "canceling_pairs" => {
            l.expect_len(3)?;
            Tag::CancelingPairs {
                count: l.parse_field(2, "count")?,
            }
        }
        "slice_two_handles" => {
            l.expect_len(3)?;
            Tag::SliceTwoHandles {
                count: l.parse_field(2, "count")?,
            }
        }
        "boundary_sum" => {
            l.expect_len(2)?;
            Tag::Sum(SumKind::Boundary)
        }
        "connected_sum" => {
            l.expect_len(2)?;
            Tag::Sum(SumKind::Connected)
        }
        other => return Err(l.err(1, format!("unknown tag {other:?}"))),
    };
    Ok(tag)
}

/// Parses a `handlebody v1` file.
///
/// ```text
/// handlebody v1
/// one_handles 1
/// two_handle 1 word=1 1 -1 framing=0
/// linking 1 2 -1
/// front 1 writhe=0 right=1 up=1 down=1
/// tag wminus target=1 p=2
/// ```
///
/// Linking lines are closed under symmetry; a pair given twice with
/// different values is rejected. Unlisted pairs link zero.
pub fn parse_handlebody(text: &str) -> Result<Handlebody2> {
    let all = significant_lines(text);
    let lines = check_header(&all, "handlebody", false)?;
    let mut one_handles: Option<usize> = None;
    let mut handles: BTreeMap<usize, (Vec<i64>, BigInt, usize)> = BTreeMap::new();
    let mut links: BTreeMap<(usize, usize), (BigInt, usize)> = BTreeMap::new();
    let mut fronts: BTreeMap<usize, (FrontCounts, usize)> = BTreeMap::new();
    let mut tags = Vec::new();

    for l in lines {
        match l.toks[0].1 {
            "one_handles" => {
                if one_handles.is_some() {
                    return Err(l.err(0, "one_handles given twice"));
                }
                l.expect_len(2)?;
                one_handles = Some(l.parse(1, "1-handle count")?);
            }
            "two_handle" => {
                let k = one_handles.ok_or_else(|| l.err(0, "two_handle before one_handles"))?;
                let id: usize = l.parse(1, "2-handle id")?;
                if id == 0 {
                    return Err(l.err(1, "2-handle ids start at 1"));
                }
                if handles.contains_key(&id) {
                    return Err(l.err(1, format!("2-handle {id} defined twice")));
                }
                let first = l.field(2, "word")?;
                let mut word = Vec::new();
                let mut i = 2;
                let mut pending = (!first.is_empty()).then_some(first);
                loop {
                    if let Some(s) = pending.take() {
                        let g: i64 = s
                            .parse()
                            .map_err(|_| l.err(i, format!("invalid generator {s:?}")))?;
                        if g == 0 || g.unsigned_abs() as usize > k {
                            return Err(l.err(
                                i,
                                format!("unknown generator {g}; there are {k} 1-handles"),
                            ));
                        }
                        word.push(g);
                    }
                    i += 1;
                    let s = l.tok(i, "framing=")?;
                    if s.starts_with("framing=") {
                        break;
                    }
                    pending = Some(s);
                }
                let framing: BigInt = l.parse_field(i, "framing")?;
                l.expect_len(i + 1)?;
                handles.insert(id, (word, framing, l.no));
            }
            "linking" => {
                l.expect_len(4)?;
                let i: usize = l.parse(1, "2-handle id")?;
                let j: usize = l.parse(2, "2-handle id")?;
                let v: BigInt = l.parse(3, "linking number")?;
                if i == j {
                    return Err(l.err(
                        2,
                        "self-linking is the framing; use framing= on the two_handle line",
                    ));
                }
                if i == 0 || j == 0 {
                    return Err(l.err(if i == 0 { 1 } else { 2 }, "2-handle ids start at 1"));
                }
                let key = (i.min(j), i.max(j));
                if let Some((old, at)) = links.get(&key) {
                    if *old != v {
                        return Err(l.err(
                            3,
                            format!(
                                "asymmetric linking: {} {} is {old} on line {at}",
                                key.0, key.1
                            ),
                        ));
                    }
                } else {
                    links.insert(key, (v, l.no));
                }
            }
            "front" => {
                l.expect_len(6)?;
                let id: usize = l.parse(1, "2-handle id")?;
                if fronts.contains_key(&id) {
                    return Err(l.err(1, format!("front for 2-handle {id} given twice")));
                }
                let f = FrontCounts::new(
                    l.parse_field(2, "writhe")?,
                    l.parse_field(3, "right")?,
                    l.parse_field(4, "up")?,
                    l.parse_field(5, "down")?,
                )
                .map_err(|e| l.err(2, e.to_string()))?;
                fronts.insert(id, (f, l.no));
            }
            "tag" => tags.push(parse_tag(l)?),
            other => return Err(l.err(0, format!("unknown line kind {other:?}"))),
        }
    }

    let k = one_handles.ok_or_else(|| Error::Parse {
        line: all.last().map_or(1, |l| l.no),
        column: 1,
        message: "missing one_handles line".into(),
    })?;
    let n = handles.len();
    if let Some((&id, &(_, _, at))) = handles.iter().find(|(&id, _)| id > n) {
        return Err(Error::Parse {
            line: at,
            column: 12,
            message: format!("2-handle ids must be 1..{n}; found {id}"),
        });
    }
    let mut linking = IntMatrix::zeros(n, n);
    let mut two_handles = Vec::with_capacity(n);
    for (&id, (word, framing, _)) in &handles {
        linking.set(id - 1, id - 1, framing.clone());
        two_handles.push(TwoHandle::new(word.clone()));
    }
    for (&(i, j), (v, at)) in &links {
        if j > n {
            return Err(Error::Parse {
                line: *at,
                column: 1,
                message: format!("linking refers to 2-handle {j}, but there are {n}"),
            });
        }
        linking.set(i - 1, j - 1, v.clone());
        linking.set(j - 1, i - 1, v.clone());
    }
    for (&id, (f, at)) in &fronts {
        if id == 0 || id > n {
            return Err(Error::Parse {
                line: *at,
                column: 7,
                message: format!("front refers to 2-handle {id}, but there are {n}"),
            });
        }
        two_handles[id - 1].front = Some(*f);
    }
    Ok(Handlebody2::new(k, two_handles, linking)?.with_tags(tags))
}

/// Canonical rendering: header, `one_handles`, then 2-handles, linking,
/// fronts and tags, each by id (tags in history order). Zero linking
/// numbers are omitted.
pub fn render_handlebody(h: &Handlebody2) -> String {
    let mut out = String::from("handlebody v1\n");
    let _ = writeln!(out, "one_handles {}", h.one_handles());
    let n = h.two_handles().len();
    for (i, th) in h.two_handles().iter().enumerate() {
        let _ = writeln!(
            out,
            "two_handle {} word={} framing={}",
            i + 1,
            join(&th.word, " "),
            h.framing(i + 1)
        );
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = h.linking().get(i, j);
            if v.sign() != num_bigint::Sign::NoSign {
                let _ = writeln!(out, "linking {} {} {v}", i + 1, j + 1);
            }
        }
    }
    for (i, th) in h.two_handles().iter().enumerate() {
        if let Some(f) = th.front {
            let _ = writeln!(
                out,
                "front {} writhe={} right={} up={} down={}",
                i + 1,
                f.writhe(),
                f.right_cusps(),
                f.up_cusps(),
                f.down_cusps()
            );
        }
    }
    for t in h.tags() {
        let _ = writeln!(out, "tag {t}");
    }
    out
}

/// Parses `entry g=<g> n=<n> value=<int|inf|-inf>` lines, optionally
/// preceded by `table v1`.
pub fn parse_table(text: &str) -> Result<DiskBundleTable> {
    let all = significant_lines(text);
    let lines = check_header(&all, "table", true)?;
    let mut entries = BTreeMap::new();
    for l in lines {
        if l.toks[0].1 != "entry" {
            return Err(l.err(0, format!("unknown line kind {:?}", l.toks[0].1)));
        }
        l.expect_len(4)?;
        let g: u64 = l.parse_field(1, "g")?;
        let n: i64 = l.parse_field(2, "n")?;
        let v: OrderedValue = l.parse_field(3, "value")?;
        if entries.insert((g, n), v).is_some() {
            return Err(l.err(1, format!("entry g={g} n={n} given twice")));
        }
    }
    DiskBundleTable::new(entries).map_err(|e| Error::Parse {
        line: all.last().map_or(1, |l| l.no),
        column: 1,
        message: e.to_string(),
    })
}

pub fn render_table(t: &DiskBundleTable) -> String {
    let mut out = String::from("table v1\n");
    for ((g, n), v) in t.entries() {
        let _ = writeln!(out, "entry g={g} n={n} value={v}");
    }
    out
}

fn parse_rows(lines: &[&Line<'_>], width: Option<usize>) -> Result<IntMatrix> {
    let n = width.unwrap_or(lines.len());
    let mut entries = Vec::with_capacity(n * n);
    for l in lines {
        if l.toks.len() - 1 != n {
            return Err(l.err(
                0,
                format!("row has {} entries, expected {n}", l.toks.len() - 1),
            ));
        }
        for i in 1..=n {
            entries.push(l.parse::<BigInt>(i, "matrix entry")?);
        }
    }
    if lines.len() != n {
        let at = lines.last().map_or(1, |l| l.no);
        return Err(Error::Parse {
            line: at,
            column: 1,
            message: format!("form has {} rows, expected {n}", lines.len()),
        });
    }
    IntMatrix::new(n, n, entries)
}

fn render_rows(out: &mut String, m: &IntMatrix) {
    for i in 0..m.rows() {
        let row = m.row(i);
        if row.is_empty() {
            out.push_str("row\n");
        } else {
            let _ = writeln!(out, "row {}", join(&row, " "));
        }
    }
}

/// Parses a `form v1` file: one `row` line per row of a symmetric matrix.
pub fn parse_form(text: &str) -> Result<IntMatrix> {
    let all = significant_lines(text);
    let lines = check_header(&all, "form", false)?;
    if let Some(l) = lines.iter().find(|l| l.toks[0].1 != "row") {
        return Err(l.err(0, format!("unknown line kind {:?}", l.toks[0].1)));
    }
    let rows: Vec<&Line<'_>> = lines.iter().collect();
    let m = parse_rows(&rows, None)?;
    if !m.is_symmetric() {
        let at = rows.last().map_or(1, |l| l.no);
        return Err(Error::Parse {
            line: at,
            column: 1,
            message: "form is not symmetric".into(),
        });
    }
    Ok(m)
}

pub fn render_form(q: &IntMatrix) -> String {
    let mut out = String::from("form v1\n");
    render_rows(&mut out, q);
    out
}

/// Parses a `module v1` file.
///
/// ```text
/// module v1
/// orders 0 2
/// row 1 0
/// row 0 0
/// value class=1,0 g=2
/// ```
///
/// `orders` lists the order of each cyclic generator (`0` for `Z`), the
/// `row` lines give the form, and each `value` line is a genus table entry.
pub fn parse_module(text: &str) -> Result<DecoratedModule> {
    let all = significant_lines(text);
    let lines = check_header(&all, "module", false)?;
    let Some(first) = lines.first().filter(|l| l.toks[0].1 == "orders") else {
        let (line, column) = lines.first().map_or((all[0].no + 1, 1), |l| (l.no, 1));
        return Err(Error::Parse {
            line,
            column,
            message: "expected an orders line after the header".into(),
        });
    };
    let orders: Vec<BigInt> = (1..first.toks.len())
        .map(|i| first.parse(i, "generator order"))
        .collect::<Result<_>>()?;
    let n = orders.len();
    let rows: Vec<&Line<'_>> = lines[1..]
        .iter()
        .take_while(|l| l.toks[0].1 == "row")
        .collect();
    let form = parse_rows(&rows, Some(n))?;
    let mut table = GTable::new();
    let mut last = first.no;
    for l in &lines[1 + rows.len()..] {
        last = l.no;
        if l.toks[0].1 != "value" {
            return Err(l.err(0, format!("unexpected line kind {:?}", l.toks[0].1)));
        }
        l.expect_len(3)?;
        let class = l.field(1, "class")?;
        let coords: Vec<BigInt> = if class.is_empty() {
            Vec::new()
        } else {
            class
                .split(',')
                .map(|s| {
                    s.parse()
                        .map_err(|_| l.err(1, format!("invalid coordinate {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        if coords.len() != n {
            return Err(l.err(
                1,
                format!("class has {} coordinates, expected {n}", coords.len()),
            ));
        }
        let v: OrderedValue = l.parse_field(2, "g")?;
        if table.insert(coords, v).is_some() {
            return Err(l.err(1, "class given twice"));
        }
    }
    DecoratedModule::new(orders, form, table).map_err(|e| Error::Parse {
        line: last,
        column: 1,
        message: e.to_string(),
    })
}

/// Canonical rendering with table keys in their reduced, sorted order.
pub fn render_module(d: &DecoratedModule) -> String {
    let mut out = String::from("module v1\n");
    if d.rank() == 0 {
        out.push_str("orders\n");
    } else {
        let _ = writeln!(out, "orders {}", join(d.orders(), " "));
    }
    render_rows(&mut out, d.form());
    for (k, v) in d.gvalues() {
        let _ = writeln!(out, "value class={} g={v}", join(k, ","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handlebody;

    #[test]
    fn minimal_file_is_the_ball() {
        let h = parse_handlebody("handlebody v1\none_handles 0\n").unwrap();
        assert_eq!(h, Handlebody2::empty());
        assert_eq!(render_handlebody(&h), "handlebody v1\none_handles 0\n");
    }

    #[test]
    fn s2_times_d2() {
        let h = parse_handlebody(
            "# zero-framed unknot\nhandlebody v1\none_handles 0\ntwo_handle 1 word= framing=0\n",
        )
        .unwrap();
        assert_eq!(h.two_handles().len(), 1);
        assert_eq!(*h.framing(1), BigInt::from(0));
    }

    #[test]
    fn cork_round_trip() {
        let mut h = handlebody::mazur_cork_template(1, 2, 1).unwrap();
        h = handlebody::w_plus(&handlebody::w_minus(&h, 1, 2).unwrap(), 1, 1).unwrap();
        let text = render_handlebody(&h);
        let back = parse_handlebody(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(render_handlebody(&back), text);
    }

    #[test]
    fn out_of_order_lines_are_canonicalized() {
        let text = "handlebody v1\none_handles 1\ntwo_handle 2 word=-1 framing=3\nlinking 2 1 4\n\
                    two_handle 1 word=1 1 framing=-1\nlinking 1 2 4\n";
        let h = parse_handlebody(text).unwrap();
        assert_eq!(
            render_handlebody(&h),
            "handlebody v1\none_handles 1\ntwo_handle 1 word=1 1 framing=-1\n\
             two_handle 2 word=-1 framing=3\nlinking 1 2 4\n"
        );
    }

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_handlebody(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let (l, c, m) =
            parse_err("handlebody v1\none_handles 1\ntwo_handle 1 word=1 2 framing=0\n");
        assert_eq!((l, c), (3, 21));
        assert!(m.contains("unknown generator 2"));
        let (l, c, _) = parse_err("handlebody v1\none_handles 0\ntwo_handle 1 word= framing=0\ntwo_handle 2 word= framing=0\nlinking 1 2 1\nlinking 2 1 3\n");
        assert_eq!((l, c), (6, 13));
        let (l, c, _) = parse_err("handlebody v2\n");
        assert_eq!((l, c), (1, 12));
        let (l, _, m) = parse_err("handlebody v1\none_handles 0\nbogus 1\n");
        assert_eq!(l, 3);
        assert!(m.contains("bogus"));
        let (l, _, _) = parse_err("handlebody v1\none_handles 0\ntwo_handle 2 word= framing=0\n");
        assert_eq!(l, 3);
    }

    #[test]
    fn table_round_trip() {
        let t = parse_table("entry g=0 n=0 value=-inf\nentry g=1 n=0 value=3\n").unwrap();
        assert_eq!(t.g_max(), 1);
        let text = render_table(&t);
        assert_eq!(
            text,
            "table v1\nentry g=0 n=0 value=-inf\nentry g=1 n=0 value=3\n"
        );
        assert_eq!(parse_table(&text).unwrap(), t);
        assert!(matches!(
            parse_table("entry g=0 n=0 value=2\nentry g=1 n=0 value=1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn module_round_trip() {
        let text =
            "module v1\norders 0 2\nrow 1 0\nrow 0 0\nvalue class=1,0 g=2\nvalue class=1,3 g=inf\n";
        let d = parse_module(text).unwrap();
        assert_eq!(d.rank(), 2);
        let r = render_module(&d);
        assert_eq!(
            r,
            "module v1\norders 0 2\nrow 1 0\nrow 0 0\nvalue class=1,0 g=2\nvalue class=1,1 g=inf\n"
        );
        assert_eq!(parse_module(&r).unwrap(), d);
        let z = render_module(&DecoratedModule::zero());
        assert_eq!(parse_module(&z).unwrap(), DecoratedModule::zero());
    }

    #[test]
    fn form_files() {
        let q = parse_form("form v1\nrow -1 0\nrow 0 -1\n").unwrap();
        assert_eq!(q, IntMatrix::from_i64_rows(&[vec![-1, 0], vec![0, -1]]));
        assert_eq!(parse_form(&render_form(&q)).unwrap(), q);
        assert!(parse_form("form v1\nrow 0 1\nrow 2 0\n").is_err());
        assert!(parse_form("form v1\nrow 0 1\n").is_err());
    }
}
