//! Foreign-key aware emission order for the tables of a snapshot.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diag::Diagnostic;
use crate::model::{SchemaSnapshot, TableDef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emission {
    pub tables: Vec<TableDef>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Orders tables so that every referenced table precedes the tables whose
/// foreign keys point at it. Ties go alphabetically. Tables on a foreign-key
/// cycle are emitted alphabetically as a block, with one diagnostic per cycle.
pub fn order_for_emission(s: &SchemaSnapshot) -> Emission {
    let names: Vec<&String> = s.tables.keys().collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();

    // deps[i]: tables that table i references (and so must follow).
    let deps: Vec<BTreeSet<usize>> = s
        .tables
        .values()
        .enumerate()
        .map(|(i, t)| {
            t.foreign_keys
                .iter()
                .filter_map(|fk| index.get(fk.ref_table.as_str()).copied())
                .filter(|&j| j != i)
                .collect()
        })
        .collect();

    let components = strongly_connected(&deps);
    let mut comp_of = vec![0usize; names.len()];
    for (c, members) in components.iter().enumerate() {
        for &m in members {
            comp_of[m] = c;
        }
    }

    let mut waiting_on: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); components.len()];
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); components.len()];
    for (i, d) in deps.iter().enumerate() {
        for &j in d {
            let (ci, cj) = (comp_of[i], comp_of[j]);
            if ci != cj && waiting_on[ci].insert(cj) {
                blocks[cj].push(ci);
            }
        }
    }

    // Members are index-sorted, and indices follow name order.
    let key = |c: usize| components[c][0];
    let mut ready: BTreeSet<(usize, usize)> =
        (0..components.len()).filter(|&c| waiting_on[c].is_empty()).map(|c| (key(c), c)).collect();
    let mut remaining: Vec<usize> = waiting_on.iter().map(BTreeSet::len).collect();
    let tables: Vec<&TableDef> = s.tables.values().collect();
    let mut out = Emission { tables: Vec::with_capacity(tables.len()), diagnostics: Vec::new() };

    while let Some((_, c)) = ready.pop_first() {
        let members = &components[c];
        if members.len() > 1 {
            let listed: Vec<&str> = members.iter().map(|&m| names[m].as_str()).collect();
            out.diagnostics.push(Diagnostic::warning(
                None,
                format!("foreign-key cycle among tables {}; emitted alphabetically", listed.join(", ")),
            ));
        }
        out.tables.extend(members.iter().map(|&m| tables[m].clone()));
        for &next in &blocks[c] {
            remaining[next] -= 1;
            if remaining[next] == 0 {
                ready.insert((key(next), next));
            }
        }
    }
    out
}

/// Tarjan's algorithm; each component's members are returned sorted.
fn strongly_connected(edges: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        edges: &'a [BTreeSet<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }

    fn visit(st: &mut State<'_>, v: usize) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in st.edges[v].iter() {
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = st.stack.pop() {
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.out.push(comp);
        }
    }

    let n = edges.len();
    let mut st = State {
        edges,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.out
}
