//! Browse, click and purchase log records and page-view grouping.
//!
//! CSV headers are fixed per kind:
//!
//! * browse: `timestamp,pv_id,user_id,item_id,position,clicked`
//! * click / purchase: `timestamp,pv_id,user_id,item_id,price`
//!
//! JSONL files use the same field names, one object per line. A
//! `user_profile` field in click and purchase logs is accepted and ignored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Browse,
    Click,
    Purchase,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 3] = [Self::Browse, Self::Click, Self::Purchase];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Browse => "browse",
            Self::Click => "click",
            Self::Purchase => "purchase",
        }
    }

    /// Ordered column names of the CSV header for this kind.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Self::Browse => &BROWSE_COLUMNS,
            Self::Click | Self::Purchase => &TRANSACTION_COLUMNS,
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InteractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "browse" => Ok(Self::Browse),
            "click" => Ok(Self::Click),
            "purchase" => Ok(Self::Purchase),
            other => Err(Error::Argument(format!("unknown interaction kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for LogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(Error::Argument(format!("unknown log format `{other}`"))),
        }
    }
}

const BROWSE_COLUMNS: [&str; 6] = ["timestamp", "pv_id", "user_id", "item_id", "position", "clicked"];
const TRANSACTION_COLUMNS: [&str; 5] = ["timestamp", "pv_id", "user_id", "item_id", "price"];
const IGNORED_COLUMNS: [&str; 1] = ["user_profile"];

/// One browse, click or purchase event.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionRecord {
    pub kind: InteractionKind,
    pub timestamp: i64,
    pub pv_id: String,
    pub user_id: String,
    pub item_id: String,
    /// Browse only.
    pub position: Option<u32>,
    /// Browse only.
    pub clicked: Option<bool>,
    /// Click and purchase only.
    pub price: Option<f64>,
}

impl InteractionRecord {
    pub fn browse(
        timestamp: i64,
        pv_id: impl Into<String>,
        user_id: impl Into<String>,
        item_id: impl Into<String>,
        position: u32,
        clicked: bool,
    ) -> Self {
        Self {
            kind: InteractionKind::Browse,
            timestamp,
            pv_id: pv_id.into(),
            user_id: user_id.into(),
            item_id: item_id.into(),
            position: Some(position),
            clicked: Some(clicked),
            price: None,
        }
    }

    pub fn transaction(
        kind: InteractionKind,
        timestamp: i64,
        pv_id: impl Into<String>,
        user_id: impl Into<String>,
        item_id: impl Into<String>,
        price: f64,
    ) -> Self {
        Self {
            kind,
            timestamp,
            pv_id: pv_id.into(),
            user_id: user_id.into(),
            item_id: item_id.into(),
            position: None,
            clicked: None,
            price: Some(price),
        }
    }

    /// Checks the per-kind field invariants.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.timestamp <= 0 {
            return Err(format!("timestamp must be positive, got {}", self.timestamp));
        }
        for (name, value) in [("pv_id", &self.pv_id), ("user_id", &self.user_id), ("item_id", &self.item_id)] {
            if value.is_empty() {
                return Err(format!("`{name}` is empty"));
            }
        }
        match self.kind {
            InteractionKind::Browse => {
                if self.position.is_none() || self.clicked.is_none() {
                    return Err("browse record needs `position` and `clicked`".into());
                }
                if self.price.is_some() {
                    return Err("browse record must not carry `price`".into());
                }
            }
            InteractionKind::Click | InteractionKind::Purchase => {
                match self.price {
                    None => return Err(format!("{} record needs `price`", self.kind)),
                    Some(p) if !(p.is_finite() && p >= 0.0) => {
                        return Err(format!("price must be a non-negative number, got {p}"))
                    }
                    Some(_) => {}
                }
                if self.position.is_some() || self.clicked.is_some() {
                    return Err(format!("{} record must not carry browse fields", self.kind));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Skip and count malformed rows instead of failing on the first one.
    pub lenient: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedLog {
    pub records: Vec<InteractionRecord>,
    pub skipped: usize,
}

/// Parses a log of the given kind. Records come back in file order.
pub fn parse_log<R: Read>(
    kind: InteractionKind,
    reader: R,
    format: LogFormat,
    options: ParseOptions,
) -> Result<ParsedLog> {
    match format {
        LogFormat::Csv => parse_csv(kind, reader, options),
        LogFormat::Jsonl => parse_jsonl(kind, reader, options),
    }
}

fn foreign_columns(kind: InteractionKind) -> &'static [&'static str] {
    match kind {
        InteractionKind::Browse => &["price"],
        _ => &["position", "clicked"],
    }
}

fn parse_csv<R: Read>(kind: InteractionKind, reader: R, options: ParseOptions) -> Result<ParsedLog> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Ok(ParsedLog::default());
    }

    let position_of: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h.trim(), i)).collect();
    for foreign in foreign_columns(kind) {
        if position_of.contains_key(foreign) {
            return Err(Error::Schema {
                line: 1,
                message: format!("column `{foreign}` does not belong in a {kind} log"),
            });
        }
    }
    for name in position_of.keys() {
        if !kind.columns().contains(name) && !IGNORED_COLUMNS.contains(name) {
            return Err(Error::Schema {
                line: 1,
                message: format!("unexpected column `{name}` in {kind} log"),
            });
        }
    }
    let mut index = Vec::with_capacity(kind.columns().len());
    for col in kind.columns() {
        match position_of.get(col) {
            Some(&i) => index.push(i),
            None => {
                return Err(Error::Schema {
                    line: 1,
                    message: format!("missing column `{col}` for {kind} log"),
                })
            }
        }
    }

    let mut out = ParsedLog::default();
    let mut row = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                if options.lenient {
                    out.skipped += 1;
                    continue;
                }
                return Err(Error::Parse { line, message: e.to_string() });
            }
        }
        let line = row.position().map_or(line, |p| p.line());
        if row.len() == 1 && row[0].trim().is_empty() {
            continue;
        }
        match csv_row(kind, &row, &index) {
            Ok(rec) => out.records.push(rec),
            Err(_) if options.lenient => out.skipped += 1,
            Err(message) => return Err(Error::Parse { line, message }),
        }
    }
    Ok(out)
}

fn field<'a>(row: &'a csv::StringRecord, index: &[usize], slot: usize) -> std::result::Result<&'a str, String> {
    let col = index[slot];
    row.get(col)
        .map(str::trim)
        .ok_or_else(|| format!("row has {} fields, expected at least {}", row.len(), col + 1))
}

fn csv_row(kind: InteractionKind, row: &csv::StringRecord, index: &[usize]) -> std::result::Result<InteractionRecord, String> {
    let timestamp = parse_timestamp(field(row, index, 0)?)?;
    let pv_id = field(row, index, 1)?.to_owned();
    let user_id = field(row, index, 2)?.to_owned();
    let item_id = field(row, index, 3)?.to_owned();
    let rec = match kind {
        InteractionKind::Browse => InteractionRecord {
            kind,
            timestamp,
            pv_id,
            user_id,
            item_id,
            position: Some(parse_position(field(row, index, 4)?)?),
            clicked: Some(parse_clicked(field(row, index, 5)?)?),
            price: None,
        },
        _ => InteractionRecord {
            kind,
            timestamp,
            pv_id,
            user_id,
            item_id,
            position: None,
            clicked: None,
            price: Some(parse_price(field(row, index, 4)?)?),
        },
    };
    rec.validate()?;
    Ok(rec)
}

fn parse_timestamp(s: &str) -> std::result::Result<i64, String> {
    s.parse::<i64>().map_err(|_| format!("invalid timestamp `{s}`"))
}

fn parse_position(s: &str) -> std::result::Result<u32, String> {
    s.parse::<u32>().map_err(|_| format!("invalid position `{s}`"))
}

fn parse_clicked(s: &str) -> std::result::Result<bool, String> {
    match s {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(format!("invalid clicked flag `{s}` (expected 0 or 1)")),
    }
}

fn parse_price(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("invalid price `{s}`"))
}

fn parse_jsonl<R: Read>(kind: InteractionKind, reader: R, options: ParseOptions) -> Result<ParsedLog> {
    let mut out = ParsedLog::default();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<Value>(&line)
            .map_err(|e| JsonRowError::Malformed(e.to_string()))
            .and_then(|v| json_row(kind, v));
        match parsed {
            Ok(rec) => out.records.push(rec),
            Err(_) if options.lenient => out.skipped += 1,
            Err(JsonRowError::Malformed(message)) => return Err(Error::Parse { line: line_no, message }),
            Err(JsonRowError::Schema(message)) => return Err(Error::Schema { line: line_no, message }),
        }
    }
    Ok(out)
}

enum JsonRowError {
    Malformed(String),
    Schema(String),
}

fn json_row(kind: InteractionKind, value: Value) -> std::result::Result<InteractionRecord, JsonRowError> {
    let Value::Object(obj) = value else {
        return Err(JsonRowError::Malformed("line is not a JSON object".into()));
    };
    for foreign in foreign_columns(kind) {
        if obj.contains_key(*foreign) {
            return Err(JsonRowError::Schema(format!("field `{foreign}` does not belong in a {kind} log")));
        }
    }
    for key in obj.keys() {
        let k = key.as_str();
        if !kind.columns().contains(&k) && !IGNORED_COLUMNS.contains(&k) {
            return Err(JsonRowError::Schema(format!("unexpected field `{k}` in {kind} log")));
        }
    }
    let get = |name: &str| -> std::result::Result<&Value, JsonRowError> {
        obj.get(name)
            .ok_or_else(|| JsonRowError::Schema(format!("missing field `{name}` for {kind} log")))
    };
    let malformed = JsonRowError::Malformed;

    let timestamp = match get("timestamp")? {
        Value::Number(n) => n.as_i64().ok_or_else(|| malformed(format!("invalid timestamp `{n}`")))?,
        Value::String(s) => parse_timestamp(s).map_err(malformed)?,
        other => return Err(malformed(format!("invalid timestamp `{other}`"))),
    };
    let pv_id = json_id(get("pv_id")?, "pv_id")?;
    let user_id = json_id(get("user_id")?, "user_id")?;
    let item_id = json_id(get("item_id")?, "item_id")?;

    let rec = match kind {
        InteractionKind::Browse => {
            let position = match get("position")? {
                Value::Number(n) => n
                    .as_u64()
                    .and_then(|p| u32::try_from(p).ok())
                    .ok_or_else(|| malformed(format!("invalid position `{n}`")))?,
                Value::String(s) => parse_position(s).map_err(malformed)?,
                other => return Err(malformed(format!("invalid position `{other}`"))),
            };
            let clicked = match get("clicked")? {
                Value::Bool(b) => *b,
                Value::Number(n) => match n.as_u64() {
                    Some(0) => false,
                    Some(1) => true,
                    _ => return Err(malformed(format!("invalid clicked flag `{n}`"))),
                },
                Value::String(s) => parse_clicked(s).map_err(malformed)?,
                other => return Err(malformed(format!("invalid clicked flag `{other}`"))),
            };
            InteractionRecord::browse(timestamp, pv_id, user_id, item_id, position, clicked)
        }
        _ => {
            let price = match get("price")? {
                Value::Number(n) => n.as_f64().ok_or_else(|| malformed(format!("invalid price `{n}`")))?,
                Value::String(s) => parse_price(s).map_err(malformed)?,
                other => return Err(malformed(format!("invalid price `{other}`"))),
            };
            InteractionRecord::transaction(kind, timestamp, pv_id, user_id, item_id, price)
        }
    };
    rec.validate().map_err(malformed)?;
    Ok(rec)
}

fn json_id(v: &Value, name: &str) -> std::result::Result<String, JsonRowError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
        other => Err(JsonRowError::Malformed(format!("invalid `{name}` value `{other}`"))),
    }
}

/// Writes records of one kind in the canonical column order.
pub fn write_log<W: Write>(
    kind: InteractionKind,
    records: &[InteractionRecord],
    format: LogFormat,
    writer: W,
) -> Result<()> {
    if let Some(bad) = records.iter().find(|r| r.kind != kind) {
        return Err(Error::Argument(format!(
            "cannot write a {} record into a {kind} log",
            bad.kind
        )));
    }
    match format {
        LogFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(kind.columns())?;
            for r in records {
                let ts = r.timestamp.to_string();
                match kind {
                    InteractionKind::Browse => {
                        let pos = r.position.unwrap_or_default().to_string();
                        let clicked = if r.clicked.unwrap_or_default() { "1" } else { "0" };
                        w.write_record([ts.as_str(), &r.pv_id, &r.user_id, &r.item_id, &pos, clicked])?;
                    }
                    _ => {
                        let price = r.price.unwrap_or_default().to_string();
                        w.write_record([ts.as_str(), &r.pv_id, &r.user_id, &r.item_id, &price])?;
                    }
                }
            }
            w.flush()?;
        }
        LogFormat::Jsonl => {
            let mut w = writer;
            for r in records {
                let mut obj = Map::new();
                obj.insert("timestamp".into(), r.timestamp.into());
                obj.insert("pv_id".into(), r.pv_id.clone().into());
                obj.insert("user_id".into(), r.user_id.clone().into());
                obj.insert("item_id".into(), r.item_id.clone().into());
                match kind {
                    InteractionKind::Browse => {
                        obj.insert("position".into(), r.position.unwrap_or_default().into());
                        obj.insert("clicked".into(), u8::from(r.clicked.unwrap_or_default()).into());
                    }
                    _ => {
                        obj.insert("price".into(), r.price.unwrap_or_default().into());
                    }
                }
                serde_json::to_writer(&mut w, &Value::Object(obj))?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageItem {
    pub item_id: String,
    pub position: u32,
    pub clicked: bool,
}

/// The items recommended on one page, ordered by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageView {
    pub pv_id: String,
    pub user_id: String,
    pub start_time: i64,
    pub items: Vec<PageItem>,
}

impl PageView {
    /// A page view counts as clicked when any of its items was clicked.
    pub fn is_clicked(&self) -> bool {
        self.items.iter().any(|i| i.clicked)
    }
}

/// Groups browse records into page views, per user, ordered by start time.
///
/// Start-time ties keep the order in which the page views first appear in
/// the input.
pub fn group_page_views(records: &[InteractionRecord]) -> Result<BTreeMap<String, Vec<PageView>>> {
    struct Acc {
        first_seen: usize,
        view: PageView,
    }

    let mut by_pv: HashMap<&str, Acc> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        if r.kind != InteractionKind::Browse {
            return Err(Error::Argument(format!("record {i} is a {} record, expected browse", r.kind)));
        }
        let item = PageItem {
            item_id: r.item_id.clone(),
            position: r
                .position
                .ok_or_else(|| Error::Integrity(format!("browse record {i} has no position")))?,
            clicked: r
                .clicked
                .ok_or_else(|| Error::Integrity(format!("browse record {i} has no clicked flag")))?,
        };
        let acc = by_pv.entry(r.pv_id.as_str()).or_insert_with(|| Acc {
            first_seen: i,
            view: PageView {
                pv_id: r.pv_id.clone(),
                user_id: r.user_id.clone(),
                start_time: r.timestamp,
                items: Vec::new(),
            },
        });
        if acc.view.user_id != r.user_id {
            return Err(Error::Integrity(format!(
                "page view `{}` is shared by users `{}` and `{}`",
                r.pv_id, acc.view.user_id, r.user_id
            )));
        }
        acc.view.start_time = acc.view.start_time.min(r.timestamp);
        acc.view.items.push(item);
    }

    let mut per_user: BTreeMap<String, Vec<(usize, PageView)>> = BTreeMap::new();
    for (_, mut acc) in by_pv {
        acc.view.items.sort_by_key(|i| i.position);
        let mut seen = HashSet::with_capacity(acc.view.items.len());
        for item in &acc.view.items {
            if !seen.insert(item.position) {
                return Err(Error::Integrity(format!(
                    "duplicate position {} in page view `{}`",
                    item.position, acc.view.pv_id
                )));
            }
        }
        per_user
            .entry(acc.view.user_id.clone())
            .or_default()
            .push((acc.first_seen, acc.view));
    }

    Ok(per_user
        .into_iter()
        .map(|(user, mut views)| {
            views.sort_by_key(|(first_seen, v)| (v.start_time, *first_seen));
            (user, views.into_iter().map(|(_, v)| v).collect())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(kind: InteractionKind, s: &str, format: LogFormat, lenient: bool) -> Result<ParsedLog> {
        parse_log(kind, s.as_bytes(), format, ParseOptions { lenient })
    }

    #[test]
    fn empty_stream_is_empty_log() {
        for format in [LogFormat::Csv, LogFormat::Jsonl] {
            let log = parse_str(InteractionKind::Browse, "", format, false).unwrap();
            assert!(log.records.is_empty());
            assert_eq!(log.skipped, 0);
        }
    }

    #[test]
    fn one_browse_row() {
        let expected = InteractionRecord::browse(1_556_000_000, "pv1", "u1", "i9", 3, true);
        let mut buf = Vec::new();
        write_log(InteractionKind::Browse, std::slice::from_ref(&expected), LogFormat::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "timestamp,pv_id,user_id,item_id,position,clicked\n1556000000,pv1,u1,i9,3,1\n"
        );
        let log = parse_log(InteractionKind::Browse, buf.as_slice(), LogFormat::Csv, ParseOptions::default()).unwrap();
        assert_eq!(log.records, vec![expected]);
        assert_eq!(log.records[0].clicked, Some(true));
    }

    #[test]
    fn missing_clicked_column_names_it() {
        let err = parse_str(
            InteractionKind::Browse,
            "timestamp,pv_id,user_id,item_id,position\n1,a,u,i,0\n",
            LogFormat::Csv,
            false,
        )
        .unwrap_err();
        match err {
            Error::Schema { message, .. } => assert!(message.contains("`clicked`"), "{message}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn jsonl_missing_field_is_schema_error() {
        let err = parse_str(
            InteractionKind::Browse,
            r#"{"timestamp":1,"pv_id":"a","user_id":"u","item_id":"i","position":0}"#,
            LogFormat::Jsonl,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { line: 1, ref message } if message.contains("clicked")));
    }

    #[test]
    fn price_column_rejected_in_browse_log() {
        let err = parse_str(
            InteractionKind::Browse,
            "timestamp,pv_id,user_id,item_id,position,clicked,price\n",
            LogFormat::Csv,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn user_profile_is_ignored() {
        let log = parse_str(
            InteractionKind::Click,
            "timestamp,pv_id,user_id,user_profile,item_id,price\n10,p,u,\"age=30\",i,9.5\n",
            LogFormat::Csv,
            false,
        )
        .unwrap();
        assert_eq!(log.records[0].price, Some(9.5));
        assert_eq!(log.records[0].item_id, "i");
    }

    #[test]
    fn malformed_row_strict_reports_line() {
        let text = "timestamp,pv_id,user_id,item_id,price\n10,p,u,i,1.0\n11,p,u,i,abc\n12,p,u,i,2.0\n";
        let err = parse_str(InteractionKind::Click, text, LogFormat::Csv, false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");

        let log = parse_str(InteractionKind::Click, text, LogFormat::Csv, true).unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.skipped, 1);
    }

    #[test]
    fn invariant_violations_are_malformed_rows() {
        for row in ["0,p,u,i,1.0", "5,p,,i,1.0", "5,p,u,i,-2"] {
            let text = format!("timestamp,pv_id,user_id,item_id,price\n{row}\n");
            let err = parse_str(InteractionKind::Purchase, &text, LogFormat::Csv, false).unwrap_err();
            assert!(matches!(err, Error::Parse { line: 2, .. }), "{row}: {err:?}");
        }
    }

    #[test]
    fn jsonl_accepts_numeric_flags_and_ids() {
        let log = parse_str(
            InteractionKind::Browse,
            "{\"timestamp\":5,\"pv_id\":\"a\",\"user_id\":7,\"item_id\":\"x\",\"position\":2,\"clicked\":1}\n\n{\"timestamp\":6,\"pv_id\":\"a\",\"user_id\":\"7\",\"item_id\":\"y\",\"position\":3,\"clicked\":false}\n",
            LogFormat::Jsonl,
            false,
        )
        .unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.records[0].user_id, "7");
        assert_eq!(log.records[1].clicked, Some(false));
    }

    #[test]
    fn page_views_group_by_pv() {
        let recs = vec![
            InteractionRecord::browse(10, "a", "u", "i1", 1, false),
            InteractionRecord::browse(10, "a", "u", "i0", 0, true),
            InteractionRecord::browse(20, "b", "u", "i2", 0, false),
        ];
        let pvs = group_page_views(&recs).unwrap();
        let views = &pvs["u"];
        assert_eq!(views.len(), 2);
        assert_eq!(views[0].items.len(), 2);
        assert_eq!(views[1].items.len(), 1);
        assert_eq!(views[0].items[0].item_id, "i0");
        assert!(views[0].is_clicked());
        assert!(!views[1].is_clicked());
    }

    #[test]
    fn no_records_no_page_views() {
        assert!(group_page_views(&[]).unwrap().is_empty());
    }

    #[test]
    fn duplicate_position_is_integrity_error() {
        let recs = vec![
            InteractionRecord::browse(10, "a", "u", "i1", 0, false),
            InteractionRecord::browse(11, "a", "u", "i2", 0, false),
        ];
        assert!(matches!(group_page_views(&recs), Err(Error::Integrity(_))));
    }

    #[test]
    fn shared_pv_across_users_is_integrity_error() {
        let recs = vec![
            InteractionRecord::browse(10, "a", "u", "i1", 0, false),
            InteractionRecord::browse(10, "a", "v", "i2", 1, false),
        ];
        assert!(matches!(group_page_views(&recs), Err(Error::Integrity(_))));
    }

    #[test]
    fn start_time_ties_follow_file_order() {
        let recs = vec![
            InteractionRecord::browse(10, "z", "u", "i1", 0, false),
            InteractionRecord::browse(10, "a", "u", "i2", 0, false),
        ];
        let pvs = group_page_views(&recs).unwrap();
        let ids: Vec<_> = pvs["u"].iter().map(|v| v.pv_id.as_str()).collect();
        assert_eq!(ids, ["z", "a"]);
    }
}
