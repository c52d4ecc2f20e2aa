//! Structural edit operations between two parsed Java files.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::parser::{FieldDecl, MethodDecl, StatementKind, StatementNode, StructureTree, TypeDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Significance {
    Low,
    Medium,
    High,
    Crucial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EditKind {
    StmtInsert,
    StmtDelete,
    StmtUpdate,
    ConditionChange,
    MethodAdd,
    MethodRemove,
    MethodSignatureChange,
    FieldAdd,
    FieldRemove,
    FieldTypeChange,
    TypeDeclChange,
    TypeAdd,
    TypeRemove,
}

impl EditKind {
    pub const ALL: [EditKind; 13] = [
        EditKind::StmtInsert,
        EditKind::StmtDelete,
        EditKind::StmtUpdate,
        EditKind::ConditionChange,
        EditKind::MethodAdd,
        EditKind::MethodRemove,
        EditKind::MethodSignatureChange,
        EditKind::FieldAdd,
        EditKind::FieldRemove,
        EditKind::FieldTypeChange,
        EditKind::TypeDeclChange,
        EditKind::TypeAdd,
        EditKind::TypeRemove,
    ];

    /// Body edits are low or medium; changes to a type's interface are high
    /// or crucial.
    pub fn significance(self) -> Significance {
        use EditKind::*;
        match self {
            StmtInsert | StmtDelete => Significance::Low,
            StmtUpdate | ConditionChange | FieldAdd => Significance::Medium,
            MethodAdd | MethodSignatureChange | MethodRemove | FieldRemove | FieldTypeChange => {
                Significance::High
            }
            TypeDeclChange | TypeAdd | TypeRemove => Significance::Crucial,
        }
    }

    /// The operation produced by diffing in the opposite direction.
    pub fn inverse(self) -> EditKind {
        use EditKind::*;
        match self {
            StmtInsert => StmtDelete,
            StmtDelete => StmtInsert,
            MethodAdd => MethodRemove,
            MethodRemove => MethodAdd,
            FieldAdd => FieldRemove,
            FieldRemove => FieldAdd,
            TypeAdd => TypeRemove,
            TypeRemove => TypeAdd,
            other => other,
        }
    }

    pub fn is_body_edit(self) -> bool {
        matches!(
            self,
            EditKind::StmtInsert
                | EditKind::StmtDelete
                | EditKind::StmtUpdate
                | EditKind::ConditionChange
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: EditKind,
    pub significance: Significance,
    /// Entity the edit applies to, e.g. `Outer.Inner#run/2`.
    pub entity: String,
}

impl EditOp {
    fn new(kind: EditKind, entity: impl Into<String>) -> Self {
        Self {
            kind,
            significance: kind.significance(),
            entity: entity.into(),
        }
    }
}

pub fn diff_structures(old: &StructureTree, new: &StructureTree) -> Vec<EditOp> {
    let mut ops = Vec::new();
    let new_types: HashMap<&str, &TypeDecl> = new
        .type_decls
        .iter()
        .map(|t| (t.name.as_str(), t))
        .collect();
    let old_names: HashSet<&str> = old.type_decls.iter().map(|t| t.name.as_str()).collect();

    for old_type in &old.type_decls {
        match new_types.get(old_type.name.as_str()) {
            Some(new_type) => diff_types(old_type, new_type, &mut ops),
            None => whole_type(old_type, EditKind::TypeRemove, &mut ops),
        }
    }
    for new_type in &new.type_decls {
        if !old_names.contains(new_type.name.as_str()) {
            whole_type(new_type, EditKind::TypeAdd, &mut ops);
        }
    }
    ops
}

/// A type appearing or disappearing takes its members with it.
fn whole_type(decl: &TypeDecl, kind: EditKind, ops: &mut Vec<EditOp>) {
    let (method_kind, field_kind) = if kind == EditKind::TypeAdd {
        (EditKind::MethodAdd, EditKind::FieldAdd)
    } else {
        (EditKind::MethodRemove, EditKind::FieldRemove)
    };
    ops.push(EditOp::new(kind, &decl.name));
    for field in &decl.fields {
        ops.push(EditOp::new(
            field_kind,
            format!("{}.{}", decl.name, field.name),
        ));
    }
    for method in &decl.methods {
        ops.push(EditOp::new(method_kind, method_entity(&decl.name, method)));
    }
}

fn method_entity(type_name: &str, m: &MethodDecl) -> String {
    format!("{type_name}#{}/{}", m.name, m.arity())
}

fn diff_types(old: &TypeDecl, new: &TypeDecl, ops: &mut Vec<EditOp>) {
    if old.kind != new.kind || old.modifiers != new.modifiers || old.supertypes != new.supertypes {
        ops.push(EditOp::new(EditKind::TypeDeclChange, &new.name));
    }
    diff_fields(&old.name, &old.fields, &new.fields, ops);
    diff_methods(&old.name, &old.methods, &new.methods, ops);
}

fn diff_fields(type_name: &str, old: &[FieldDecl], new: &[FieldDecl], ops: &mut Vec<EditOp>) {
    let new_by_name: HashMap<&str, &FieldDecl> = new.iter().map(|f| (f.name.as_str(), f)).collect();
    let old_names: HashSet<&str> = old.iter().map(|f| f.name.as_str()).collect();
    for field in old {
        let entity = format!("{type_name}.{}", field.name);
        match new_by_name.get(field.name.as_str()) {
            Some(n) if n.type_text != field.type_text => {
                ops.push(EditOp::new(EditKind::FieldTypeChange, entity))
            }
            Some(_) => {}
            None => ops.push(EditOp::new(EditKind::FieldRemove, entity)),
        }
    }
    for field in new {
        if !old_names.contains(field.name.as_str()) {
            ops.push(EditOp::new(
                EditKind::FieldAdd,
                format!("{type_name}.{}", field.name),
            ));
        }
    }
}

/// Methods are matched by (name, arity). Overloads sharing both are paired
/// first by identical parameter types, then in declaration order.
fn diff_methods(type_name: &str, old: &[MethodDecl], new: &[MethodDecl], ops: &mut Vec<EditOp>) {
    let mut groups: BTreeMap<(&str, usize), (Vec<&MethodDecl>, Vec<&MethodDecl>)> = BTreeMap::new();
    for m in old {
        groups
            .entry((m.name.as_str(), m.arity()))
            .or_default()
            .0
            .push(m);
    }
    for m in new {
        groups
            .entry((m.name.as_str(), m.arity()))
            .or_default()
            .1
            .push(m);
    }

    for (olds, news) in groups.values() {
        let mut old_used = vec![false; olds.len()];
        let mut new_used = vec![false; news.len()];
        let mut pairs = Vec::new();
        for (i, o) in olds.iter().enumerate() {
            if let Some(j) = (0..news.len()).find(|&j| !new_used[j] && news[j].params == o.params) {
                old_used[i] = true;
                new_used[j] = true;
                pairs.push((i, j));
            }
        }
        let rest_old: Vec<usize> = (0..olds.len()).filter(|&i| !old_used[i]).collect();
        let rest_new: Vec<usize> = (0..news.len()).filter(|&j| !new_used[j]).collect();
        for (&i, &j) in rest_old.iter().zip(&rest_new) {
            pairs.push((i, j));
        }
        for &i in rest_old.iter().skip(rest_new.len()) {
            ops.push(EditOp::new(
                EditKind::MethodRemove,
                method_entity(type_name, olds[i]),
            ));
        }
        for &j in rest_new.iter().skip(rest_old.len()) {
            ops.push(EditOp::new(
                EditKind::MethodAdd,
                method_entity(type_name, news[j]),
            ));
        }
        pairs.sort_unstable();
        for (i, j) in pairs {
            let (o, n) = (olds[i], news[j]);
            let entity = method_entity(type_name, n);
            if o.params != n.params || o.return_type != n.return_type || o.modifiers != n.modifiers
            {
                ops.push(EditOp::new(EditKind::MethodSignatureChange, entity.clone()));
            }
            for kind in diff_bodies(&o.body, &n.body) {
                ops.push(EditOp::new(kind, entity.clone()));
            }
        }
    }
}

fn is_condition(kind: StatementKind) -> bool {
    matches!(kind, StatementKind::If | StatementKind::Loop)
}

/// Statement edits between two bodies.
///
/// The alignment is computed in a canonical direction (lexicographically
/// smaller body first) so that diffing the other way yields exactly the
/// inverse operations.
pub fn diff_bodies(old: &[StatementNode], new: &[StatementNode]) -> Vec<EditKind> {
    if old == new {
        return Vec::new();
    }
    let key = |s: &StatementNode| (s.normalized_text.clone(), s.kind as u8);
    let forward = old.iter().map(key).lt(new.iter().map(key));
    let gaps = if forward {
        align(old, new)
    } else {
        align(new, old).into_iter().map(|(d, i)| (i, d)).collect()
    };

    let mut out = Vec::new();
    for (deleted, inserted) in gaps {
        let paired = deleted.len().min(inserted.len());
        for k in 0..paired {
            if is_condition(deleted[k].kind) && is_condition(inserted[k].kind) {
                out.push(EditKind::ConditionChange);
            } else {
                out.push(EditKind::StmtUpdate);
            }
        }
        out.extend(std::iter::repeat_n(
            EditKind::StmtDelete,
            deleted.len() - paired,
        ));
        out.extend(std::iter::repeat_n(
            EditKind::StmtInsert,
            inserted.len() - paired,
        ));
    }
    out
}

type Gap<'a> = (Vec<&'a StatementNode>, Vec<&'a StatementNode>);

/// Longest-common-subsequence alignment, returned as the runs of deleted and
/// inserted statements between consecutive matches.
fn align<'a>(a: &'a [StatementNode], b: &'a [StatementNode]) -> Vec<Gap<'a>> {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let a_mid = &a[prefix..a.len() - suffix];
    let b_mid = &b[prefix..b.len() - suffix];
    let (n, m) = (a_mid.len(), b_mid.len());

    // lcs[i][j] = LCS length of a_mid[i..] and b_mid[j..].
    let width = m + 1;
    let mut lcs = vec![0u32; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i * width + j] = if a_mid[i] == b_mid[j] {
                lcs[(i + 1) * width + j + 1] + 1
            } else {
                lcs[(i + 1) * width + j].max(lcs[i * width + j + 1])
            };
        }
    }

    let mut gaps = Vec::new();
    let mut current: Gap<'a> = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && a_mid[i] == b_mid[j] {
            if !current.0.is_empty() || !current.1.is_empty() {
                gaps.push(std::mem::take(&mut current));
            }
            i += 1;
            j += 1;
        } else if j >= m || (i < n && lcs[(i + 1) * width + j] >= lcs[i * width + j + 1]) {
            current.0.push(&a_mid[i]);
            i += 1;
        } else {
            current.1.push(&b_mid[j]);
            j += 1;
        }
    }
    if !current.0.is_empty() || !current.1.is_empty() {
        gaps.push(current);
    }
    gaps
}
