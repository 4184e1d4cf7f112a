//! Little-endian payload encoding for node messages.

use crate::error::{Error, Result};

#[derive(Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Encoder::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: usize) -> &mut Self {
        let v = u32::try_from(v).expect("value fits in u32");
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Decoder { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Net(format!("truncated payload at byte {}", self.pos)))?;
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

/// Everything one robot knows locally: its neighbors and the targets each of
/// its primitives sees.
#[derive(Clone, Debug, PartialEq)]
pub struct RobotRecord {
    pub robot: usize,
    pub neighbors: Vec<usize>,
    pub primitives: Vec<Vec<(usize, f64)>>,
}

impl RobotRecord {
    pub fn encode_into(&self, enc: &mut Encoder) {
        enc.u32(self.robot).u32(self.neighbors.len());
        for &n in &self.neighbors {
            enc.u32(n);
        }
        enc.u32(self.primitives.len());
        for list in &self.primitives {
            enc.u32(list.len());
            for &(t, c) in list {
                enc.u32(t).f64(c);
            }
        }
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self> {
        let robot = dec.u32()?;
        let n = dec.u32()?;
        let neighbors = (0..n).map(|_| dec.u32()).collect::<Result<_>>()?;
        let p = dec.u32()?;
        let mut primitives = Vec::with_capacity(p);
        for _ in 0..p {
            let len = dec.u32()?;
            let mut list = Vec::with_capacity(len);
            for _ in 0..len {
                list.push((dec.u32()?, dec.f64()?));
            }
            primitives.push(list);
        }
        Ok(RobotRecord { robot, neighbors, primitives })
    }
}

pub fn encode_records(records: &[&RobotRecord]) -> Vec<u8> {
    let mut enc = Encoder::new();
    enc.u32(records.len());
    for r in records {
        r.encode_into(&mut enc);
    }
    enc.finish()
}

pub fn decode_records(buf: &[u8]) -> Result<Vec<RobotRecord>> {
    let mut dec = Decoder::new(buf);
    let n = dec.u32()?;
    let out = (0..n).map(|_| RobotRecord::decode_from(&mut dec)).collect::<Result<Vec<_>>>()?;
    if !dec.is_done() {
        return Err(Error::Net("trailing bytes in record batch".into()));
    }
    Ok(out)
}
