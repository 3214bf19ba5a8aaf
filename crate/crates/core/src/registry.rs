//! The registration list: one row per enrolled member, appended by the
//! registration authority at issue time and scanned by the supervision
//! authority during tracing.
//!
//! Two stores implement the same interface: [`InMemoryRegistry`] for tests
//! and benchmarks, and [`FileRegistry`], an append-only log with a CRC32
//! per row so corruption is detected rather than deserialized.
//!
//! Single-writer: appends happen on the issue path only. Readers see a
//! consistent prefix because rows are framed and synced before an append
//! returns.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use crate::groups::{G1Elem, Scalar, G1_LEN, SCALAR_LEN};

/// File magic for the registry log.
const MAGIC: &[u8] = b"LGSREG1";
/// index (8) || A (48) || x (32) || Y (48) || issued_at (8).
const ROW_LEN: usize = 8 + G1_LEN + SCALAR_LEN + G1_LEN + 8;

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    /// The certificate element A is already registered.
    #[error("certificate element already registered")]
    DuplicateA,
    /// The member public key Y is already registered.
    #[error("member public key already registered")]
    DuplicateY,
    #[error("registry storage failure: {0}")]
    Storage(#[from] std::io::Error),
    /// The on-disk log failed validation; nothing was repaired.
    #[error("registry data corrupt: {0}")]
    Corrupt(&'static str),
}

/// One enrollment row. Indexes are dense from 1 in append order; the
/// encodings of A and Y are unique across the store.
///
/// x is recorded because the issuing authority knows it anyway; keeping the
/// column visible to the supervision authority is a deployment decision,
/// not enforced here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub index: u64,
    pub a: G1Elem,
    pub x: Scalar,
    pub y_pub: G1Elem,
    pub issued_at: u64,
}

impl RegistryEntry {
    fn to_row(&self) -> [u8; ROW_LEN] {
        let mut row = [0u8; ROW_LEN];
        row[..8].copy_from_slice(&self.index.to_be_bytes());
        row[8..8 + G1_LEN].copy_from_slice(&self.a.to_bytes());
        row[56..56 + SCALAR_LEN].copy_from_slice(&self.x.to_bytes());
        row[88..88 + G1_LEN].copy_from_slice(&self.y_pub.to_bytes());
        row[136..].copy_from_slice(&self.issued_at.to_be_bytes());
        row
    }

    fn from_row(row: &[u8]) -> Result<RegistryEntry, RegistryError> {
        if row.len() != ROW_LEN {
            return Err(RegistryError::Corrupt("row length"));
        }
        let decode_err = |_| RegistryError::Corrupt("row element encoding");
        Ok(RegistryEntry {
            index: u64::from_be_bytes(row[..8].try_into().expect("8-byte field")),
            a: G1Elem::from_bytes(&row[8..56]).map_err(decode_err)?,
            x: Scalar::from_bytes(&row[56..88]).map_err(decode_err)?,
            y_pub: G1Elem::from_bytes(&row[88..136]).map_err(decode_err)?,
            issued_at: u64::from_be_bytes(row[136..].try_into().expect("8-byte field")),
        })
    }
}

/// Append and lookup surface shared by the in-memory and file-backed
/// stores. The issue path is the only writer.
pub trait RegistryStore {
    /// Appends a row, assigning the next dense index, and returns it. The
    /// entry is durable before this returns (for stores that persist).
    fn append(
        &mut self,
        a: &G1Elem,
        x: &Scalar,
        y_pub: &G1Elem,
        issued_at: u64,
    ) -> Result<u64, RegistryError>;

    /// Exact match on the canonical encoding of A.
    fn lookup_by_a(&self, a: &G1Elem) -> Option<&RegistryEntry>;

    fn contains_y(&self, y_pub: &G1Elem) -> bool;

    fn contains_x(&self, x: &Scalar) -> bool;

    /// All rows in index order.
    fn entries(&self) -> &[RegistryEntry];
}

/// Rows plus the uniqueness indexes, shared by both stores.
#[derive(Debug, Default)]
struct Table {
    entries: Vec<RegistryEntry>,
    by_a: HashMap<[u8; G1_LEN], usize>,
    ys: HashSet<[u8; G1_LEN]>,
    xs: HashSet<[u8; SCALAR_LEN]>,
}

impl Table {
    /// Builds the entry that the next append would insert, enforcing the
    /// uniqueness invariants but not yet inserting it.
    fn stage(
        &self,
        a: &G1Elem,
        x: &Scalar,
        y_pub: &G1Elem,
        issued_at: u64,
    ) -> Result<RegistryEntry, RegistryError> {
        if self.by_a.contains_key(&a.to_bytes()) {
            return Err(RegistryError::DuplicateA);
        }
        if self.ys.contains(&y_pub.to_bytes()) {
            return Err(RegistryError::DuplicateY);
        }
        Ok(RegistryEntry {
            index: self.entries.len() as u64 + 1,
            a: *a,
            x: *x,
            y_pub: *y_pub,
            issued_at,
        })
    }

    fn insert(&mut self, entry: RegistryEntry) {
        self.by_a.insert(entry.a.to_bytes(), self.entries.len());
        self.ys.insert(entry.y_pub.to_bytes());
        self.xs.insert(entry.x.to_bytes());
        self.entries.push(entry);
    }

    fn lookup_by_a(&self, a: &G1Elem) -> Option<&RegistryEntry> {
        self.by_a.get(&a.to_bytes()).map(|&i| &self.entries[i])
    }
}

/// Volatile store for tests and benchmarks.
#[derive(Debug, Default)]
pub struct InMemoryRegistry {
    table: Table,
}

impl InMemoryRegistry {
    pub fn new() -> InMemoryRegistry {
        InMemoryRegistry::default()
    }
}

impl RegistryStore for InMemoryRegistry {
    fn append(
        &mut self,
        a: &G1Elem,
        x: &Scalar,
        y_pub: &G1Elem,
        issued_at: u64,
    ) -> Result<u64, RegistryError> {
        let entry = self.table.stage(a, x, y_pub, issued_at)?;
        let index = entry.index;
        self.table.insert(entry);
        Ok(index)
    }

    fn lookup_by_a(&self, a: &G1Elem) -> Option<&RegistryEntry> {
        self.table.lookup_by_a(a)
    }

    fn contains_y(&self, y_pub: &G1Elem) -> bool {
        self.table.ys.contains(&y_pub.to_bytes())
    }

    fn contains_x(&self, x: &Scalar) -> bool {
        self.table.xs.contains(&x.to_bytes())
    }

    fn entries(&self) -> &[RegistryEntry] {
        &self.table.entries
    }
}

/// Append-only log file: the magic, then per row a 4-byte big-endian length,
/// the row bytes, and a CRC32 of the row bytes.
///
/// `open` validates everything up front (magic, framing, CRCs, dense
/// indexes, uniqueness) and refuses corrupt files, including a torn final
/// frame; appends are flushed and synced before returning.
#[derive(Debug)]
pub struct FileRegistry {
    file: File,
    table: Table,
}

impl FileRegistry {
    /// Creates a new empty registry file. Refuses to overwrite.
    pub fn create(path: impl AsRef<Path>) -> Result<FileRegistry, RegistryError> {
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(path)?;
        file.write_all(MAGIC)?;
        file.sync_data()?;
        Ok(FileRegistry {
            file,
            table: Table::default(),
        })
    }

    /// Opens and fully validates an existing registry file.
    pub fn open(path: impl AsRef<Path>) -> Result<FileRegistry, RegistryError> {
        let mut file = OpenOptions::new().read(true).append(true).open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(RegistryError::Corrupt("bad magic"));
        }
        let mut table = Table::default();
        let mut rest = &bytes[MAGIC.len()..];
        while !rest.is_empty() {
            if rest.len() < 4 {
                return Err(RegistryError::Corrupt("truncated frame header"));
            }
            let len = u32::from_be_bytes(rest[..4].try_into().expect("4-byte field")) as usize;
            if len != ROW_LEN {
                return Err(RegistryError::Corrupt("unexpected row length"));
            }
            if rest.len() < 4 + len + 4 {
                return Err(RegistryError::Corrupt("truncated row frame"));
            }
            let row = &rest[4..4 + len];
            let crc =
                u32::from_be_bytes(rest[4 + len..4 + len + 4].try_into().expect("4-byte field"));
            if crc32fast::hash(row) != crc {
                return Err(RegistryError::Corrupt("row checksum mismatch"));
            }
            let entry = RegistryEntry::from_row(row)?;
            if entry.index != table.entries.len() as u64 + 1 {
                return Err(RegistryError::Corrupt("index sequence"));
            }
            if table.stage(&entry.a, &entry.x, &entry.y_pub, entry.issued_at).is_err() {
                return Err(RegistryError::Corrupt("duplicate row"));
            }
            table.insert(entry);
            rest = &rest[4 + len + 4..];
        }
        Ok(FileRegistry { file, table })
    }
}

impl RegistryStore for FileRegistry {
    fn append(
        &mut self,
        a: &G1Elem,
        x: &Scalar,
        y_pub: &G1Elem,
        issued_at: u64,
    ) -> Result<u64, RegistryError> {
        let entry = self.table.stage(a, x, y_pub, issued_at)?;
        let row = entry.to_row();
        let mut frame = Vec::with_capacity(4 + ROW_LEN + 4);
        frame.extend_from_slice(&(ROW_LEN as u32).to_be_bytes());
        frame.extend_from_slice(&row);
        frame.extend_from_slice(&crc32fast::hash(&row).to_be_bytes());
        // The in-memory table is updated only after the row is durable, so
        // an I/O failure never leaves a row visible that is not on disk.
        self.file.write_all(&frame)?;
        self.file.sync_data()?;
        let index = entry.index;
        self.table.insert(entry);
        Ok(index)
    }

    fn lookup_by_a(&self, a: &G1Elem) -> Option<&RegistryEntry> {
        self.table.lookup_by_a(a)
    }

    fn contains_y(&self, y_pub: &G1Elem) -> bool {
        self.table.ys.contains(&y_pub.to_bytes())
    }

    fn contains_x(&self, x: &Scalar) -> bool {
        self.table.xs.contains(&x.to_bytes())
    }

    fn entries(&self) -> &[RegistryEntry] {
        &self.table.entries
    }
}
