//! Little-endian binary encoding shared by every on-disk artifact.
//!
//! Each artifact starts with 8 magic bytes and a `u32` version. Everything
//! after the header is a flat stream of fixed-width little-endian values;
//! sequences are length-prefixed with a `u64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub struct Encoder<W: Write> {
    inner: W,
}

impl<W: Write> Encoder<W> {
    pub fn new(inner: W) -> Self {
        Encoder { inner }
    }

    pub fn header(&mut self, magic: &[u8; 8], version: u32) -> Result<()> {
        self.inner.write_all(magic)?;
        self.u32(version)
    }

    pub fn u8(&mut self, v: u8) -> Result<()> {
        self.inner.write_all(&[v])?;
        Ok(())
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn usize(&mut self, v: usize) -> Result<()> {
        self.u64(v as u64)
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn f64_slice(&mut self, vs: &[f64]) -> Result<()> {
        self.usize(vs.len())?;
        for &v in vs {
            self.f64(v)?;
        }
        Ok(())
    }

    pub fn u32_slice(&mut self, vs: &[u32]) -> Result<()> {
        self.usize(vs.len())?;
        for &v in vs {
            self.u32(v)?;
        }
        Ok(())
    }

    pub fn usize_slice(&mut self, vs: &[usize]) -> Result<()> {
        self.usize(vs.len())?;
        for &v in vs {
            self.usize(v)?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub struct Decoder<R: Read> {
    inner: R,
}

impl<R: Read> Decoder<R> {
    pub fn new(inner: R) -> Self {
        Decoder { inner }
    }

    /// Reads and checks the magic bytes and version.
    pub fn header(&mut self, magic: &[u8; 8], kind: &'static str, version: u32) -> Result<()> {
        let mut found = [0u8; 8];
        self.fill(&mut found)?;
        if &found != magic {
            return Err(Error::Format(format!("not a {kind} file (bad magic bytes)")));
        }
        let v = self.u32()?;
        if v != version {
            return Err(Error::Version {
                kind,
                found: v,
                expected: version,
            });
        }
        Ok(())
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::Format("truncated artifact".into())
            } else {
                Error::RawIo(e)
            }
        })
    }

    pub fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.fill(&mut b)?;
        Ok(b[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.fill(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    pub fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    pub fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("length {v} overflows usize")))
    }

    /// A length prefix, bounded so a corrupted file cannot request absurd allocations.
    pub fn len(&mut self, limit: usize) -> Result<usize> {
        let n = self.usize()?;
        if n > limit {
            return Err(Error::Format(format!("length {n} exceeds limit {limit}")));
        }
        Ok(n)
    }

    pub fn f64(&mut self) -> Result<f64> {
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }

    pub fn f64_vec(&mut self) -> Result<Vec<f64>> {
        let n = self.len(1 << 34)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn u32_vec(&mut self) -> Result<Vec<u32>> {
        let n = self.len(1 << 34)?;
        (0..n).map(|_| self.u32()).collect()
    }

    pub fn usize_vec(&mut self) -> Result<Vec<usize>> {
        let n = self.len(1 << 34)?;
        (0..n).map(|_| self.usize()).collect()
    }

    /// Fails unless the stream is fully consumed.
    pub fn expect_end(mut self) -> Result<()> {
        let mut b = [0u8; 1];
        match self.inner.read(&mut b)? {
            0 => Ok(()),
            _ => Err(Error::Format("trailing bytes after artifact".into())),
        }
    }
}

pub fn create(path: &Path) -> Result<Encoder<BufWriter<File>>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(Encoder::new(BufWriter::new(f)))
}

pub fn open(path: &Path) -> Result<Decoder<BufReader<File>>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(Decoder::new(BufReader::new(f)))
}
