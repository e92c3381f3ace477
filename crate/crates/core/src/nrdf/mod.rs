//! NRDF: a small self-describing hierarchical binary container.
//!
//! A file holds a string heap and a tree of nodes; each node carries typed
//! scalar attributes, typed n-dimensional arrays and child nodes. All names
//! are indices into the string heap. The physical layout, little-endian
//! throughout:
//!
//! ```text
//! header   "NRDF" | u32 version=1 | u64 heap offset | u64 heap length | u64 root offset
//! heap     u32 count, then per string: u32 byte length + UTF-8 bytes
//! node     u32 name | u32 #attrs | u32 #arrays | u32 #children
//!          attrs:    u32 name | u8 type (1=i64 2=f64 3=string 4=u32) | 8-byte value
//!          arrays:   u32 name | u8 element type (1=i64 2=f64 4=u32) | u8 rank
//!                    | rank x u64 dims | raw payload
//!          children: nodes, depth-first
//! ```
//!
//! String-index and u32 attribute values occupy the low four bytes of their
//! 8-byte slot; the rest is zero. The root node has no name and stores
//! [`NO_NAME`] in its name slot. Writers emit the heap right after the header
//! and the root right after the heap, so equal files encode to equal bytes.

mod codec;
mod dump;
mod layout;

pub use codec::{from_bytes, read_file, to_bytes, write_file, HEADER_LEN};
pub use dump::{dump, DumpMode};
pub use layout::{load_reactor, load_reactors, store_reactor, store_reactors};

use std::collections::HashSet;

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"NRDF";
pub const VERSION: u32 = 1;
/// Name slot value of the root node.
pub const NO_NAME: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum NrdfError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("encode error: {0}")]
    Encode(String),
    #[error("not an NRDF file")]
    NotNrdf,
    #[error("corrupt file at offset {offset}: {reason}")]
    Corrupt { offset: u64, reason: String },
    #[error("unsupported NRDF version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid reactor layout: {0}")]
    Layout(String),
}

pub type Result<T, E = NrdfError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy)]
pub enum AttrValue {
    I64(i64),
    F64(f64),
    /// Index into the string heap.
    Str(u32),
    U32(u32),
}

impl AttrValue {
    pub fn type_code(&self) -> u8 {
        match self {
            AttrValue::I64(_) => 1,
            AttrValue::F64(_) => 2,
            AttrValue::Str(_) => 3,
            AttrValue::U32(_) => 4,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            AttrValue::I64(_) => "i64",
            AttrValue::F64(_) => "f64",
            AttrValue::Str(_) => "str",
            AttrValue::U32(_) => "u32",
        }
    }
}

// Bitwise float comparison: logical equality must imply byte equality.
impl PartialEq for AttrValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AttrValue::I64(a), AttrValue::I64(b)) => a == b,
            (AttrValue::F64(a), AttrValue::F64(b)) => a.to_bits() == b.to_bits(),
            (AttrValue::Str(a), AttrValue::Str(b)) => a == b,
            (AttrValue::U32(a), AttrValue::U32(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementType {
    I64,
    F64,
    U32,
}

impl ElementType {
    pub fn code(self) -> u8 {
        match self {
            ElementType::I64 => 1,
            ElementType::F64 => 2,
            ElementType::U32 => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(ElementType::I64),
            2 => Some(ElementType::F64),
            4 => Some(ElementType::U32),
            _ => None,
        }
    }

    pub fn size(self) -> usize {
        match self {
            ElementType::I64 | ElementType::F64 => 8,
            ElementType::U32 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementType::I64 => "i64",
            ElementType::F64 => "f64",
            ElementType::U32 => "u32",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ArrayData {
    I64(Vec<i64>),
    F64(Vec<f64>),
    U32(Vec<u32>),
}

impl ArrayData {
    pub fn element_type(&self) -> ElementType {
        match self {
            ArrayData::I64(_) => ElementType::I64,
            ArrayData::F64(_) => ElementType::F64,
            ArrayData::U32(_) => ElementType::U32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ArrayData::I64(v) => v.len(),
            ArrayData::F64(v) => v.len(),
            ArrayData::U32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl PartialEq for ArrayData {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ArrayData::I64(a), ArrayData::I64(b)) => a == b,
            (ArrayData::F64(a), ArrayData::F64(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (ArrayData::U32(a), ArrayData::U32(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: u32,
    pub value: AttrValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    pub name: u32,
    pub dims: Vec<u64>,
    pub data: ArrayData,
}

impl Array {
    /// Element count implied by `dims`, or `None` on overflow.
    pub fn declared_len(&self) -> Option<u64> {
        self.dims.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrdfNode {
    pub name: u32,
    pub attributes: Vec<Attribute>,
    pub arrays: Vec<Array>,
    pub children: Vec<NrdfNode>,
}

impl NrdfNode {
    pub fn new(name: u32) -> Self {
        Self {
            name,
            attributes: Vec::new(),
            arrays: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn root() -> Self {
        Self::new(NO_NAME)
    }

    pub fn attr(&self, name: u32) -> Option<&AttrValue> {
        self.attributes.iter().find(|a| a.name == name).map(|a| &a.value)
    }

    pub fn array(&self, name: u32) -> Option<&Array> {
        self.arrays.iter().find(|a| a.name == name)
    }

    pub fn child(&self, name: u32) -> Option<&NrdfNode> {
        self.children.iter().find(|c| c.name == name)
    }

    /// Number of nodes in this subtree, including `self`.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(NrdfNode::node_count).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrdfFile {
    pub version: u32,
    pub strings: Vec<String>,
    pub root: NrdfNode,
}

impl Default for NrdfFile {
    fn default() -> Self {
        Self {
            version: VERSION,
            strings: Vec::new(),
            root: NrdfNode::root(),
        }
    }
}

impl NrdfFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn string(&self, index: u32) -> Option<&str> {
        self.strings.get(index as usize).map(String::as_str)
    }

    pub fn string_index(&self, s: &str) -> Option<u32> {
        self.strings.iter().position(|x| x == s).map(|i| i as u32)
    }

    /// Display name of a node; the root is `/`.
    pub fn node_name<'a>(&'a self, node: &NrdfNode) -> &'a str {
        if node.name == NO_NAME {
            "/"
        } else {
            self.string(node.name).unwrap_or("?")
        }
    }

    /// Checks every invariant the writer relies on.
    pub fn validate(&self) -> Result<()> {
        if self.version != VERSION {
            return Err(NrdfError::Encode(format!("version must be {VERSION}, got {}", self.version)));
        }
        if self.strings.len() >= NO_NAME as usize {
            return Err(NrdfError::Encode("string heap too large".into()));
        }
        let mut seen = HashSet::with_capacity(self.strings.len());
        for s in &self.strings {
            if !seen.insert(s.as_str()) {
                return Err(NrdfError::Encode(format!("duplicate heap string {s:?}")));
            }
            if s.len() > u32::MAX as usize {
                return Err(NrdfError::Encode("heap string longer than u32::MAX bytes".into()));
            }
        }
        if self.root.name != NO_NAME {
            return Err(NrdfError::Encode("root node must not be named".into()));
        }
        self.validate_node(&self.root, true)
    }

    fn validate_node(&self, node: &NrdfNode, is_root: bool) -> Result<()> {
        let heap = self.strings.len() as u32;
        let check = |idx: u32, what: &str| {
            if idx < heap {
                Ok(())
            } else {
                Err(NrdfError::Encode(format!("{what} string index {idx} outside heap of {heap}")))
            }
        };
        if !is_root {
            check(node.name, "node name")?;
        }
        let count_ok = |n: usize| n <= u32::MAX as usize;
        if !(count_ok(node.attributes.len()) && count_ok(node.arrays.len()) && count_ok(node.children.len())) {
            return Err(NrdfError::Encode("too many entries in one node".into()));
        }
        let mut names = HashSet::new();
        for a in &node.attributes {
            check(a.name, "attribute name")?;
            if let AttrValue::Str(s) = a.value {
                check(s, "attribute value")?;
            }
            if !names.insert(a.name) {
                return Err(NrdfError::Encode(format!(
                    "duplicate attribute {:?} in node {:?}",
                    self.string(a.name),
                    self.node_name(node)
                )));
            }
        }
        let mut names = HashSet::new();
        for arr in &node.arrays {
            check(arr.name, "array name")?;
            if !names.insert(arr.name) {
                return Err(NrdfError::Encode(format!(
                    "duplicate array {:?} in node {:?}",
                    self.string(arr.name),
                    self.node_name(node)
                )));
            }
            if arr.dims.len() > u8::MAX as usize {
                return Err(NrdfError::Encode("array rank above 255".into()));
            }
            if arr.declared_len() != Some(arr.data.len() as u64) {
                return Err(NrdfError::Encode(format!(
                    "array {:?}: dims {:?} do not match {} elements",
                    self.string(arr.name),
                    arr.dims,
                    arr.data.len()
                )));
            }
        }
        for child in &node.children {
            self.validate_node(child, false)?;
        }
        Ok(())
    }
}

/// Incremental construction of an [`NrdfFile`] with string interning.
#[derive(Debug, Default)]
pub struct FileBuilder {
    strings: Vec<String>,
    index: std::collections::HashMap<String, u32>,
}

impl FileBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.strings.len() as u32;
        self.strings.push(s.to_owned());
        self.index.insert(s.to_owned(), i);
        i
    }

    pub fn node(&mut self, name: &str) -> NrdfNode {
        NrdfNode::new(self.intern(name))
    }

    pub fn attr(&mut self, node: &mut NrdfNode, name: &str, value: AttrValue) {
        let name = self.intern(name);
        node.attributes.push(Attribute { name, value });
    }

    pub fn attr_str(&mut self, node: &mut NrdfNode, name: &str, value: &str) {
        let v = self.intern(value);
        self.attr(node, name, AttrValue::Str(v));
    }

    pub fn array(&mut self, node: &mut NrdfNode, name: &str, dims: Vec<u64>, data: ArrayData) {
        let name = self.intern(name);
        node.arrays.push(Array { name, dims, data });
    }

    pub fn finish(self, root: NrdfNode) -> NrdfFile {
        NrdfFile {
            version: VERSION,
            strings: self.strings,
            root,
        }
    }
}
