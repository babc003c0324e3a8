//! Ground-truth relevance grades.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::corpus::run::tsv_reader;
use crate::error::{Error, Result};
use crate::ids::Interner;

/// Relevance grades in `[0, 1]` for (user, item) pairs.
///
/// Only positive grades are stored; any pair not stored has grade 0. The
/// user and item universes also contain identifiers that were declared with
/// grade 0, so a qrels file can spell out the full catalog.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelevanceTable {
    users: Interner,
    items: Interner,
    /// Per user, `(item, grade)` with `grade > 0`, sorted by item index.
    grades: Vec<Vec<(u32, f64)>>,
}

impl RelevanceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from `(user, item, grade)` triples.
    pub fn from_triples<U, I>(triples: impl IntoIterator<Item = (U, I, f64)>) -> Result<Self>
    where
        U: Into<String>,
        I: Into<String>,
    {
        let mut table = Self::new();
        for (u, i, g) in triples {
            table.set(u, i, g)?;
        }
        Ok(table)
    }

    /// Sets a grade, declaring the user and item if needed.
    pub fn set(&mut self, user: impl Into<String>, item: impl Into<String>, grade: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&grade) {
            return Err(Error::Domain(format!("grade {grade} outside [0, 1]")));
        }
        let u = self.declare_user(user) as usize;
        let i = self.declare_item(item);
        let row = &mut self.grades[u];
        match row.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) if grade > 0.0 => row[pos].1 = grade,
            Ok(pos) => {
                row.remove(pos);
            }
            Err(pos) if grade > 0.0 => row.insert(pos, (i, grade)),
            Err(_) => {}
        }
        Ok(())
    }

    pub fn declare_user(&mut self, user: impl Into<String>) -> u32 {
        let u = self.users.intern(user);
        if self.grades.len() < self.users.len() {
            self.grades.resize_with(self.users.len(), Vec::new);
        }
        u
    }

    pub fn declare_item(&mut self, item: impl Into<String>) -> u32 {
        self.items.intern(item)
    }

    pub fn users(&self) -> &Interner {
        &self.users
    }

    pub fn items(&self) -> &Interner {
        &self.items
    }

    /// Grade of item index `i` for user index `u`; 0 when unjudged.
    pub fn grade(&self, u: u32, i: u32) -> f64 {
        let row = &self.grades[u as usize];
        match row.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Positive-grade items of user `u`, sorted by item index.
    pub fn relevant(&self, u: u32) -> &[(u32, f64)] {
        &self.grades[u as usize]
    }

    /// `|R*_u|`: number of items with positive grade.
    pub fn num_relevant(&self, u: u32) -> usize {
        self.grades[u as usize].len()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(std::io::BufReader::new(file))
    }

    /// Parses `user<TAB>item<TAB>grade` rows; an optional first line with a
    /// non-numeric grade column is taken as a header.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut table = Self::new();
        let mut seen: HashMap<(u32, u32), usize> = HashMap::new();
        for (row, record) in tsv_reader(reader).records().enumerate() {
            let record = record?;
            let line = record.position().map_or(row + 1, |p| p.line() as usize);
            if record.len() == 1 && record[0].trim().is_empty() {
                continue;
            }
            if record.len() < 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 columns, found {}", record.len()),
                });
            }
            let raw = record[2].trim();
            let grade = match raw.parse::<f64>() {
                Ok(g) if (0.0..=1.0).contains(&g) => g,
                Ok(g) => {
                    return Err(Error::Parse {
                        line,
                        message: format!("grade {g} outside [0, 1]"),
                    })
                }
                Err(_) if row == 0 => continue,
                Err(_) => {
                    return Err(Error::Parse {
                        line,
                        message: format!("invalid grade {raw:?}"),
                    })
                }
            };
            let u = table.declare_user(record[0].trim());
            let i = table.declare_item(record[1].trim());
            if let Some(first) = seen.insert((u, i), line) {
                return Err(Error::Parse {
                    line,
                    message: format!("pair already judged on line {first}"),
                });
            }
            table.set(record[0].trim(), record[1].trim(), grade)?;
        }
        Ok(table)
    }

    /// Writes every stored positive grade, plus grade-0 rows for items that
    /// would otherwise drop out of the universe.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "user\titem\tgrade")?;
        let mut covered = vec![false; self.items.len()];
        let mut users_written = vec![false; self.users.len()];
        for (u, row) in self.grades.iter().enumerate() {
            for &(i, g) in row {
                covered[i as usize] = true;
                users_written[u] = true;
                writeln!(out, "{}\t{}\t{}", self.users.name(u as u32), self.items.name(i), g)?;
            }
        }
        if !self.users.is_empty() {
            let anchor = self.users.name(0);
            for (i, done) in covered.iter().enumerate() {
                if !done {
                    writeln!(out, "{anchor}\t{}\t0", self.items.name(i as u32))?;
                    users_written[0] = true;
                }
            }
        }
        for (u, done) in users_written.iter().enumerate() {
            if !done && !self.items.is_empty() {
                writeln!(out, "{}\t{}\t0", self.users.name(u as u32), self.items.name(0))?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = std::io::BufWriter::new(file);
        self.write_tsv(&mut buf).map_err(|e| Error::io(path, e))?;
        buf.flush().map_err(|e| Error::io(path, e))
    }
}
