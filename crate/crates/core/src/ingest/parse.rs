use std::io::BufRead;

use crate::error::{Error, Result};
use crate::profile::DatasetProfile;

#[derive(Clone, Debug, PartialEq)]
pub struct RatingEvent {
    pub user_id: String,
    pub item_id: String,
    pub rating: f64,
    /// Seconds since the Unix epoch.
    pub timestamp: i64,
}

/// What to do with a malformed record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// Abort on the first malformed record.
    #[default]
    Strict,
    /// Skip malformed records and count them.
    Lenient,
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    pub mode: ParseMode,
    /// Inclusive rating bounds; ratings outside are malformed records.
    pub scale: Option<(f64, f64)>,
    /// Rating for every event of a ratingless dataset.
    pub implicit_rating: Option<f64>,
}

impl ParseOptions {
    pub fn from_profile(profile: &DatasetProfile, mode: ParseMode) -> Self {
        ParseOptions {
            mode,
            scale: Some((profile.rating_min, profile.rating_max)),
            implicit_rating: profile.implicit_rating,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParseOutcome {
    pub events: Vec<RatingEvent>,
    /// Malformed records skipped in lenient mode.
    pub skipped: usize,
    /// Data records seen; always `events.len() + skipped`.
    pub data_lines: usize,
}

struct Collector<'a> {
    opts: &'a ParseOptions,
    out: ParseOutcome,
}

impl<'a> Collector<'a> {
    fn new(opts: &'a ParseOptions) -> Self {
        Collector { opts, out: ParseOutcome::default() }
    }

    fn push(&mut self, line: usize, record: Result<RatingEvent>) -> Result<()> {
        self.out.data_lines += 1;
        let record = record.and_then(|ev| self.check(line, ev));
        match (record, self.opts.mode) {
            (Ok(ev), _) => self.out.events.push(ev),
            (Err(e @ Error::Record { .. }), ParseMode::Lenient) => {
                let _ = e;
                self.out.skipped += 1;
            }
            (Err(e), _) => return Err(e),
        }
        Ok(())
    }

    fn check(&self, line: usize, ev: RatingEvent) -> Result<RatingEvent> {
        if !ev.rating.is_finite() {
            return Err(record(line, format!("rating {} is not finite", ev.rating)));
        }
        if let Some((lo, hi)) = self.opts.scale {
            if ev.rating < lo || ev.rating > hi {
                return Err(record(line, format!("rating {} outside [{lo}, {hi}]", ev.rating)));
            }
        }
        if ev.timestamp < 0 {
            return Err(record(line, format!("negative timestamp {}", ev.timestamp)));
        }
        Ok(ev)
    }
}

fn record(line: usize, message: impl Into<String>) -> Error {
    Error::Record { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| record(line, format!("{what} `{field}` is not a number")))
}

/// Parses the MovieLens `UserID::MovieID::Rating::Timestamp` format.
/// Blank lines are ignored.
pub fn parse_movielens(source: impl BufRead, opts: &ParseOptions) -> Result<ParseOutcome> {
    let mut c = Collector::new(opts);
    for (k, line) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        let parsed = (|| {
            let fields: Vec<&str> = text.split("::").collect();
            if fields.len() != 4 {
                return Err(record(line_no, format!("expected 4 `::`-separated fields, got {}", fields.len())));
            }
            Ok(RatingEvent {
                user_id: fields[0].trim().to_string(),
                item_id: fields[1].trim().to_string(),
                rating: match opts.implicit_rating {
                    Some(r) => r,
                    None => parse_num(line_no, fields[2], "rating")?,
                },
                timestamp: parse_num(line_no, fields[3], "timestamp")?,
            })
        })();
        c.push(line_no, parsed)?;
    }
    Ok(c.out)
}

/// Parses a KONECT edge list: `%` comment lines, then whitespace-separated
/// `user item [weight] timestamp` records. The timestamp is the last column.
///
/// With an implicit rating configured every event gets that rating;
/// otherwise the weight column is the rating. A record with fewer than three
/// columns has no timestamp and aborts parsing in either mode.
pub fn parse_konect(source: impl BufRead, opts: &ParseOptions) -> Result<ParseOutcome> {
    let mut c = Collector::new(opts);
    for (k, line) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(Error::MissingTimestamp { line: line_no });
        }
        let parsed = (|| {
            let rating = match (opts.implicit_rating, fields.len()) {
                (Some(r), _) => r,
                (None, n) if n >= 4 => parse_num(line_no, fields[2], "weight")?,
                (None, _) => {
                    return Err(record(line_no, "no weight column and no implicit rating configured"))
                }
            };
            Ok(RatingEvent {
                user_id: fields[0].to_string(),
                item_id: fields[1].to_string(),
                rating,
                timestamp: parse_num(line_no, fields[fields.len() - 1], "timestamp")?,
            })
        })();
        c.push(line_no, parsed)?;
    }
    Ok(c.out)
}

/// Header names of the columns a CSV file maps onto a [`RatingEvent`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMap {
    pub user: String,
    pub item: String,
    /// `None` for ratingless files; the implicit rating is used instead.
    pub rating: Option<String>,
    pub timestamp: String,
    pub delimiter: u8,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            user: "user".into(),
            item: "item".into(),
            rating: Some("rating".into()),
            timestamp: "timestamp".into(),
            delimiter: b',',
        }
    }
}

/// Parses a delimited file with a header row, picking columns by name.
pub fn parse_generic_csv(
    source: impl BufRead,
    map: &ColumnMap,
    opts: &ParseOptions,
) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(map.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let user_col = column(&map.user)?;
    let item_col = column(&map.item)?;
    let ts_col = column(&map.timestamp)?;
    let rating_col = match &map.rating {
        Some(name) => Some(column(name)?),
        None => None,
    };
    if rating_col.is_none() && opts.implicit_rating.is_none() {
        return Err(Error::invalid("no rating column mapped and no implicit rating configured"));
    }

    let mut c = Collector::new(opts);
    let mut row = csv::StringRecord::new();
    loop {
        let line_no = reader.position().line() as usize;
        match reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                let field = |col: usize| {
                    row.get(col).ok_or_else(|| record(line_no, format!("missing field {}", col + 1)))
                };
                let parsed = (|| {
                    let rating = match (opts.implicit_rating, rating_col) {
                        (Some(r), _) => r,
                        (None, Some(col)) => parse_num(line_no, field(col)?, "rating")?,
                        (None, None) => unreachable!("checked above"),
                    };
                    Ok(RatingEvent {
                        user_id: field(user_col)?.trim().to_string(),
                        item_id: field(item_col)?.trim().to_string(),
                        rating,
                        timestamp: parse_num(line_no, field(ts_col)?, "timestamp")?,
                    })
                })();
                c.push(line_no, parsed)?;
            }
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                c.push(line_no, Err(record(line_no, e.to_string())))?;
            }
        }
    }
    Ok(c.out)
}
