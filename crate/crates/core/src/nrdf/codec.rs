use std::collections::HashSet;
use std::io::{BufWriter, Read, Write};

use super::{
    Array, ArrayData, AttrValue, Attribute, ElementType, NrdfError, NrdfFile, NrdfNode, Result, MAGIC, NO_NAME, VERSION,
};

/// Fixed header size in bytes.
pub const HEADER_LEN: u64 = 32;

const NODE_HEADER_LEN: usize = 16;
const ATTR_LEN: usize = 13;
const MIN_ARRAY_LEN: usize = 6;
const MAX_DEPTH: usize = 256;

/// Encodes `file` into `sink` and returns the number of bytes written.
pub fn write_file<W: Write>(file: &NrdfFile, sink: W) -> Result<u64> {
    file.validate()?;
    let heap_len: u64 = 4 + file.strings.iter().map(|s| 4 + s.len() as u64).sum::<u64>();

    let mut w = CountingWriter {
        inner: BufWriter::with_capacity(1 << 16, sink),
        count: 0,
    };
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&HEADER_LEN.to_le_bytes())?;
    w.write_all(&heap_len.to_le_bytes())?;
    w.write_all(&(HEADER_LEN + heap_len).to_le_bytes())?;

    w.write_all(&(file.strings.len() as u32).to_le_bytes())?;
    for s in &file.strings {
        w.write_all(&(s.len() as u32).to_le_bytes())?;
        w.write_all(s.as_bytes())?;
    }
    let mut scratch = Vec::with_capacity(1 << 16);
    write_node(&mut w, &file.root, &mut scratch)?;
    w.inner.flush()?;
    Ok(w.count)
}

/// Encodes `file` into a fresh buffer.
pub fn to_bytes(file: &NrdfFile) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_file(file, &mut out)?;
    Ok(out)
}

struct CountingWriter<W: Write> {
    inner: W,
    count: u64,
}

impl<W: Write> CountingWriter<W> {
    fn write_all(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        self.inner.write_all(bytes)?;
        self.count += bytes.len() as u64;
        Ok(())
    }
}

fn write_node<W: Write>(w: &mut CountingWriter<W>, node: &NrdfNode, scratch: &mut Vec<u8>) -> Result<()> {
    w.write_all(&node.name.to_le_bytes())?;
    w.write_all(&(node.attributes.len() as u32).to_le_bytes())?;
    w.write_all(&(node.arrays.len() as u32).to_le_bytes())?;
    w.write_all(&(node.children.len() as u32).to_le_bytes())?;
    for attr in &node.attributes {
        let mut rec = [0u8; ATTR_LEN];
        rec[..4].copy_from_slice(&attr.name.to_le_bytes());
        rec[4] = attr.value.type_code();
        match attr.value {
            AttrValue::I64(v) => rec[5..].copy_from_slice(&v.to_le_bytes()),
            AttrValue::F64(v) => rec[5..].copy_from_slice(&v.to_le_bytes()),
            AttrValue::Str(v) | AttrValue::U32(v) => rec[5..9].copy_from_slice(&v.to_le_bytes()),
        }
        w.write_all(&rec)?;
    }
    for arr in &node.arrays {
        w.write_all(&arr.name.to_le_bytes())?;
        w.write_all(&[arr.data.element_type().code(), arr.dims.len() as u8])?;
        for d in &arr.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        match &arr.data {
            ArrayData::I64(v) => write_payload(w, scratch, v, |x| x.to_le_bytes())?,
            ArrayData::F64(v) => write_payload(w, scratch, v, |x| x.to_le_bytes())?,
            ArrayData::U32(v) => write_payload(w, scratch, v, |x| x.to_le_bytes())?,
        }
    }
    for child in &node.children {
        write_node(w, child, scratch)?;
    }
    Ok(())
}

fn write_payload<W: Write, T: Copy, const N: usize>(
    w: &mut CountingWriter<W>,
    scratch: &mut Vec<u8>,
    values: &[T],
    encode: impl Fn(T) -> [u8; N],
) -> Result<()> {
    for chunk in values.chunks(8192) {
        scratch.clear();
        for &v in chunk {
            scratch.extend_from_slice(&encode(v));
        }
        w.write_all(scratch)?;
    }
    Ok(())
}

/// Reads a complete file from `source`.
pub fn read_file<R: Read>(mut source: R) -> Result<NrdfFile> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

/// Decodes a file held in memory.
///
/// Every failure is reported as a structured error; allocations are bounded
/// by the bytes actually present.
pub fn from_bytes(bytes: &[u8]) -> Result<NrdfFile> {
    if bytes.len() < MAGIC.len() {
        return if MAGIC.starts_with(bytes) {
            Err(corrupt(0, "truncated magic"))
        } else {
            Err(NrdfError::NotNrdf)
        };
    }
    if bytes[..4] != MAGIC {
        return Err(NrdfError::NotNrdf);
    }
    let mut header = Reader::new(bytes, 4, HEADER_LEN.min(bytes.len() as u64) as usize);
    let version = header.u32("version")?;
    if version != VERSION {
        return Err(NrdfError::UnsupportedVersion(version));
    }
    let heap_offset = header.u64("heap offset")?;
    let heap_len = header.u64("heap length")?;
    let root_offset = header.u64("root offset")?;

    let heap_end = heap_offset
        .checked_add(heap_len)
        .filter(|&end| end <= bytes.len() as u64)
        .ok_or_else(|| corrupt(heap_offset.min(bytes.len() as u64), "string heap extends past end of file"))?;
    let mut heap = Reader::new(bytes, heap_offset as usize, heap_end as usize);
    let strings = read_heap(&mut heap)?;

    if root_offset >= bytes.len() as u64 {
        return Err(corrupt(bytes.len() as u64, "root node offset past end of file"));
    }
    let mut body = Reader::new(bytes, root_offset as usize, bytes.len());
    let root = body.node(strings.len() as u32, 0)?;
    Ok(NrdfFile {
        version,
        strings,
        root,
    })
}

fn corrupt(offset: u64, reason: impl Into<String>) -> NrdfError {
    NrdfError::Corrupt {
        offset,
        reason: reason.into(),
    }
}

fn read_heap(r: &mut Reader<'_>) -> Result<Vec<String>> {
    let count = r.u32("string count")? as usize;
    if count > r.remaining() / 4 {
        return Err(corrupt(r.pos as u64, "string count exceeds heap size"));
    }
    let mut strings = Vec::with_capacity(count);
    let mut seen = HashSet::with_capacity(count);
    for _ in 0..count {
        let len = r.u32("string length")? as usize;
        let start = r.pos;
        let raw = r.take(len, "string bytes")?;
        let s = std::str::from_utf8(raw).map_err(|_| corrupt(start as u64, "string is not UTF-8"))?;
        if !seen.insert(s) {
            return Err(corrupt(start as u64, format!("duplicate heap string {s:?}")));
        }
        strings.push(s.to_owned());
    }
    if r.remaining() != 0 {
        return Err(corrupt(r.pos as u64, "trailing bytes in string heap"));
    }
    Ok(strings)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], pos: usize, end: usize) -> Self {
        Self { buf, pos, end }
    }

    fn remaining(&self) -> usize {
        self.end - self.pos
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(corrupt(self.pos as u64, format!("truncated {what}")));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.array::<1>(what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        self.array(what).map(u32::from_le_bytes)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        self.array(what).map(u64::from_le_bytes)
    }

    fn string_index(&mut self, heap: u32, what: &str) -> Result<u32> {
        let at = self.pos as u64;
        let idx = self.u32(what)?;
        if idx >= heap {
            return Err(corrupt(at, format!("{what} index {idx} outside heap of {heap}")));
        }
        Ok(idx)
    }

    fn node(&mut self, heap: u32, depth: usize) -> Result<NrdfNode> {
        if depth > MAX_DEPTH {
            return Err(corrupt(self.pos as u64, "nodes nested too deeply"));
        }
        let name = if depth == 0 {
            let at = self.pos as u64;
            let name = self.u32("node name")?;
            if name != NO_NAME {
                return Err(corrupt(at, "root node must be unnamed"));
            }
            name
        } else {
            self.string_index(heap, "node name")?
        };
        let counts_at = self.pos as u64;
        let n_attrs = self.u32("attribute count")? as usize;
        let n_arrays = self.u32("array count")? as usize;
        let n_children = self.u32("child count")? as usize;
        let min_bytes = (n_attrs as u128) * ATTR_LEN as u128
            + (n_arrays as u128) * MIN_ARRAY_LEN as u128
            + (n_children as u128) * NODE_HEADER_LEN as u128;
        if min_bytes > self.remaining() as u128 {
            return Err(corrupt(counts_at, "entry counts exceed remaining bytes"));
        }

        let mut node = NrdfNode::new(name);
        node.attributes.reserve(n_attrs);
        let mut names = HashSet::new();
        for _ in 0..n_attrs {
            let at = self.pos as u64;
            let attr = self.attribute(heap)?;
            if !names.insert(attr.name) {
                return Err(corrupt(at, "duplicate attribute name"));
            }
            node.attributes.push(attr);
        }
        node.arrays.reserve(n_arrays);
        let mut names = HashSet::new();
        for _ in 0..n_arrays {
            let at = self.pos as u64;
            let arr = self.typed_array(heap)?;
            if !names.insert(arr.name) {
                return Err(corrupt(at, "duplicate array name"));
            }
            node.arrays.push(arr);
        }
        node.children.reserve(n_children);
        for _ in 0..n_children {
            node.children.push(self.node(heap, depth + 1)?);
        }
        Ok(node)
    }

    fn attribute(&mut self, heap: u32) -> Result<Attribute> {
        let name = self.string_index(heap, "attribute name")?;
        let code_at = self.pos as u64;
        let code = self.u8("attribute type")?;
        let value_at = self.pos as u64;
        let raw: [u8; 8] = self.array("attribute value")?;
        let low = u32::from_le_bytes(raw[..4].try_into().expect("4 bytes"));
        let padded = || {
            if raw[4..] == [0; 4] {
                Ok(())
            } else {
                Err(corrupt(value_at + 4, "non-zero attribute padding"))
            }
        };
        let value = match code {
            1 => AttrValue::I64(i64::from_le_bytes(raw)),
            2 => AttrValue::F64(f64::from_le_bytes(raw)),
            3 => {
                padded()?;
                if low >= heap {
                    return Err(corrupt(value_at, format!("string value index {low} outside heap of {heap}")));
                }
                AttrValue::Str(low)
            }
            4 => {
                padded()?;
                AttrValue::U32(low)
            }
            other => return Err(corrupt(code_at, format!("unknown attribute type {other}"))),
        };
        Ok(Attribute { name, value })
    }

    fn typed_array(&mut self, heap: u32) -> Result<Array> {
        let name = self.string_index(heap, "array name")?;
        let code_at = self.pos as u64;
        let code = self.u8("element type")?;
        let element = ElementType::from_code(code)
            .ok_or_else(|| corrupt(code_at, format!("unknown element type {code}")))?;
        let rank = self.u8("array rank")? as usize;
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(self.u64("array dimension")?);
        }
        let payload_at = self.pos as u64;
        let byte_len = dims
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .and_then(|n| n.checked_mul(element.size() as u64))
            .filter(|&n| n <= self.remaining() as u64)
            .ok_or_else(|| corrupt(payload_at, format!("array dims {dims:?} exceed remaining bytes")))?;
        let raw = self.take(byte_len as usize, "array payload")?;
        let data = match element {
            ElementType::I64 => ArrayData::I64(
                raw.chunks_exact(8)
                    .map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            ),
            ElementType::F64 => ArrayData::F64(
                raw.chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            ),
            ElementType::U32 => ArrayData::U32(
                raw.chunks_exact(4)
                    .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
                    .collect(),
            ),
        };
        Ok(Array { name, dims, data })
    }
}
