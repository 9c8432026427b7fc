//! Deduplicating set of fixed-width keys that spills sorted runs to disk once
//! the in-memory part grows past a threshold.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::PathBuf;

use crate::error::Result;

pub struct KeyStore {
    width: usize,
    threshold: usize,
    spill_dir: Option<PathBuf>,
    memory: HashSet<Vec<u8>>,
    runs: Vec<File>,
}

impl KeyStore {
    pub fn new(width: usize, threshold: usize, spill_dir: Option<PathBuf>) -> Self {
        Self {
            width,
            threshold: threshold.max(1),
            spill_dir,
            memory: HashSet::new(),
            runs: Vec::new(),
        }
    }

    pub fn insert(&mut self, key: Vec<u8>) -> Result<()> {
        debug_assert_eq!(key.len(), self.width);
        self.memory.insert(key);
        if self.memory.len() >= self.threshold {
            self.spill()?;
        }
        Ok(())
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    fn spill(&mut self) -> Result<()> {
        let mut keys: Vec<Vec<u8>> = self.memory.drain().collect();
        keys.sort_unstable();
        let file = match &self.spill_dir {
            Some(dir) => tempfile::tempfile_in(dir)?,
            None => tempfile::tempfile()?,
        };
        let mut w = BufWriter::new(file);
        for k in &keys {
            w.write_all(k)?;
        }
        let mut file = w.into_inner().map_err(|e| e.into_error())?;
        file.seek(SeekFrom::Start(0))?;
        self.runs.push(file);
        Ok(())
    }

    /// All distinct keys in increasing order.
    pub fn finish(mut self) -> Result<Vec<Vec<u8>>> {
        if self.runs.is_empty() {
            let mut keys: Vec<Vec<u8>> = self.memory.into_iter().collect();
            keys.sort_unstable();
            return Ok(keys);
        }
        if !self.memory.is_empty() {
            self.spill()?;
        }
        let width = self.width;
        let mut readers: Vec<BufReader<File>> = self.runs.into_iter().map(BufReader::new).collect();
        let next = |r: &mut BufReader<File>| -> Result<Option<Vec<u8>>> {
            let mut buf = vec![0u8; width];
            match r.read_exact(&mut buf) {
                Ok(()) => Ok(Some(buf)),
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Ok(None),
                Err(e) => Err(e.into()),
            }
        };
        let mut heap = BinaryHeap::new();
        for (i, r) in readers.iter_mut().enumerate() {
            if let Some(k) = next(r)? {
                heap.push(Reverse((k, i)));
            }
        }
        let mut out: Vec<Vec<u8>> = Vec::new();
        while let Some(Reverse((k, i))) = heap.pop() {
            if out.last() != Some(&k) {
                out.push(k);
            }
            if let Some(k) = next(&mut readers[i])? {
                heap.push(Reverse((k, i)));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spilling_gives_the_same_result() {
        let keys: Vec<Vec<u8>> = (0..500u32).map(|i| vec![(i * 37 % 101) as u8, (i % 7) as u8]).collect();
        let mut mem = KeyStore::new(2, usize::MAX, None);
        let mut disk = KeyStore::new(2, 16, None);
        for k in &keys {
            mem.insert(k.clone()).unwrap();
            disk.insert(k.clone()).unwrap();
        }
        assert!(disk.spilled_runs() > 1);
        let a = mem.finish().unwrap();
        let b = disk.finish().unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }
}
