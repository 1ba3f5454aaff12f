#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use schevo_core::{KindCounts, SchemaShape, SmoKind, TableShape};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// Per-kind counts from set differences of table names, per-table column
/// sets and per-column attribute comparisons. Shares no code with the
/// differ.
pub fn oracle_counts(old: &SchemaShape, new: &SchemaShape) -> KindCounts {
    let mut c = KindCounts::default();
    let a: BTreeSet<&String> = old.keys().collect();
    let b: BTreeSet<&String> = new.keys().collect();
    c[SmoKind::CreateTable] = b.difference(&a).count() as u64;
    c[SmoKind::DropTable] = a.difference(&b).count() as u64;
    for name in a.intersection(&b) {
        let (x, y) = (&old[*name], &new[*name]);
        let xc: BTreeSet<&String> = x.columns.keys().collect();
        let yc: BTreeSet<&String> = y.columns.keys().collect();
        c[SmoKind::AddColumn] += yc.difference(&xc).count() as u64;
        c[SmoKind::DropColumn] += xc.difference(&yc).count() as u64;
        for col in xc.intersection(&yc) {
            let ((t1, d1), (t2, d2)) = (&x.columns[*col], &y.columns[*col]);
            c[SmoKind::TypeChange] += u64::from(t1 != t2);
            c[SmoKind::InitChange] += u64::from(d1 != d2);
        }
        c[SmoKind::KeyChange] += u64::from(x.primary_key != y.primary_key);
    }
    c
}

pub fn oracle_history(shapes: &[SchemaShape]) -> KindCounts {
    shapes.windows(2).fold(KindCounts::default(), |acc, w| acc + oracle_counts(&w[0], &w[1]))
}

type Col = (&'static str, &'static str, Option<&'static str>);

fn table(cols: &[Col], pk: &[&str]) -> TableShape {
    TableShape {
        columns: cols.iter().map(|(n, t, d)| (n.to_string(), (Some(t.to_string()), d.map(String::from)))).collect(),
        primary_key: pk.iter().map(|s| s.to_string()).collect(),
    }
}

/// Hand-written schema of each revision of the bundled Monotone-style
/// corpus: what a reader of the fixture files finds declared, after
/// untyped columns are given the `integer` type.
pub fn monotone_truth(with_code: bool) -> Vec<SchemaShape> {
    (1..=5)
        .map(|rev| {
            let mut s: BTreeMap<String, TableShape> = BTreeMap::new();
            let mut files: Vec<Col> = vec![("id", "integer", None), ("data", if rev >= 5 { "blob" } else { "integer" }, None)];
            if rev >= 4 {
                files.push(("size", "integer", Some("0")));
            }
            s.insert("files".into(), table(&files, &["id"]));
            if rev <= 2 {
                s.insert("manifests".into(), table(&[("id", "integer", None), ("data", "integer", None)], &["id"]));
            }
            let mut revisions: Vec<Col> = vec![("id", "integer", None), ("data", "integer", None)];
            if rev >= 4 {
                revisions.push(("checksum", "integer", None));
            }
            s.insert("revisions".into(), table(&revisions, &["id"]));
            if rev >= 2 {
                let cols: Vec<Col> = ["id", "name", "value", "keypair", "signature"].iter().map(|c| (*c, "integer", None)).collect();
                s.insert("revision_certs".into(), table(&cols, if rev >= 5 { &["id", "name"] } else { &[] }));
            }
            if with_code {
                if rev >= 3 {
                    let delta_default = if rev >= 5 { Some("''") } else { None };
                    s.insert(
                        "file_deltas".into(),
                        table(&[("id", "integer", None), ("base", "integer", None), ("delta", "integer", delta_default)], &[]),
                    );
                }
                if rev == 3 || rev == 4 {
                    s.insert(
                        "manifest_deltas".into(),
                        table(&[("id", "integer", None), ("base", "integer", None), ("delta", "integer", None)], &[]),
                    );
                }
                if rev >= 4 {
                    s.insert(
                        "db_vars".into(),
                        table(&[("domain", "integer", None), ("name", "integer", None), ("value", "integer", None)], &[]),
                    );
                }
            }
            s
        })
        .collect()
}

/// Column lists of the bundled Vienna-style corpus, revision by revision.
pub fn vienna_truth() -> Vec<SchemaShape> {
    let info = vec!["version"];
    let mut folders = vec!["folder_id", "parent_id", "foldername", "unread_count", "last_update"];
    let mut messages = vec!["message_id", "folder_id", "parent_id", "read_flag", "marked_flag", "title", "sender", "date", "body"];
    let mut rss: Option<Vec<&str>> = None;
    let mut info = info;
    let mut out = Vec::new();
    for rev in 1..=6 {
        match rev {
            2 => messages.extend(["link", "deleted_flag", "revised_flag"]),
            3 => {
                folders.extend(["flags", "next_sibling"]);
                rss = Some(vec!["folder_id", "feed_url", "username", "last_update_string", "description"]);
            }
            5 => {
                messages.extend(["createddate", "enclosure"]);
                folders.push("first_child");
                rss.as_mut().unwrap().extend(["home_page", "bloglines_id"]);
            }
            6 => {
                messages.extend(["enclosuredownloaded_flag", "hasenclosure_flag"]);
                info.push("first_folder");
            }
            _ => {}
        }
        let cols = |names: &[&'static str]| -> Vec<Col> { names.iter().map(|n| (*n, "integer", None)).collect() };
        let mut s = BTreeMap::new();
        s.insert("info".into(), table(&cols(&info), &[]));
        s.insert("folders".into(), table(&cols(&folders), &["folder_id"]));
        s.insert("messages".into(), table(&cols(&messages), &["message_id", "folder_id"]));
        if let Some(r) = &rss {
            s.insert("rss_folders".into(), table(&cols(r), &[]));
        }
        out.push(s);
    }
    out
}
