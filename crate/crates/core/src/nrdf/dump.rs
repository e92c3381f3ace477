use std::fmt::Write;

use super::{ArrayData, AttrValue, NrdfFile, NrdfNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpMode {
    /// Node names, attributes and array shapes.
    Tree,
    /// As `Tree`, plus every array element.
    Full,
}

/// Human-readable listing of a file, one node per line, children indented
/// by two spaces.
pub fn dump(file: &NrdfFile, mode: DumpMode) -> String {
    let mut out = String::new();
    dump_node(file, &file.root, 0, mode, &mut out);
    out
}

fn dump_node(file: &NrdfFile, node: &NrdfNode, depth: usize, mode: DumpMode, out: &mut String) {
    let indent = "  ".repeat(depth);
    out.push_str(&indent);
    out.push_str(file.node_name(node));
    for attr in &node.attributes {
        let name = file.string(attr.name).unwrap_or("?");
        let _ = write!(out, " @{name}:{}=", attr.value.type_name());
        match attr.value {
            AttrValue::I64(v) => {
                let _ = write!(out, "{v}");
            }
            AttrValue::F64(v) => {
                let _ = write!(out, "{v:?}");
            }
            AttrValue::U32(v) => {
                let _ = write!(out, "{v}");
            }
            AttrValue::Str(i) => {
                let _ = write!(out, "\"{}\"", file.string(i).unwrap_or("?").escape_default());
            }
        }
    }
    for arr in &node.arrays {
        let dims: Vec<String> = arr.dims.iter().map(u64::to_string).collect();
        let _ = write!(
            out,
            " {}:{}[{}]",
            file.string(arr.name).unwrap_or("?"),
            arr.data.element_type().name(),
            dims.join("x")
        );
    }
    out.push('\n');
    if mode == DumpMode::Full {
        for arr in &node.arrays {
            let values: Vec<String> = match &arr.data {
                ArrayData::I64(v) => v.iter().map(i64::to_string).collect(),
                ArrayData::F64(v) => v.iter().map(|x| format!("{x:?}")).collect(),
                ArrayData::U32(v) => v.iter().map(u32::to_string).collect(),
            };
            let _ = writeln!(
                out,
                "{indent}  = {} [{}]",
                file.string(arr.name).unwrap_or("?"),
                values.join(", ")
            );
        }
    }
    for child in &node.children {
        dump_node(file, child, depth + 1, mode, out);
    }
}
