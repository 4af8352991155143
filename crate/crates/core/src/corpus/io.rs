use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Document, Label};

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    label: String,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    text: &'a str,
    label: &'a str,
}

fn open(path: &Path) -> Result<File, CorpusError> {
    File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_label(label: &str, line: usize) -> Result<Label, CorpusError> {
    label
        .parse()
        .map_err(|source| CorpusError::Label { line, source })
}

/// Collects documents, reporting duplicate ids against their source line.
fn assemble(records: Vec<(usize, Document)>) -> Result<Corpus, CorpusError> {
    let mut seen = std::collections::HashSet::with_capacity(records.len());
    for (line, doc) in &records {
        if !seen.insert(doc.id.clone()) {
            return Err(CorpusError::DuplicateId {
                id: doc.id.clone(),
                line: *line,
            });
        }
    }
    Corpus::new(records.into_iter().map(|(_, d)| d).collect())
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    read_jsonl(open(path)?).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

/// Reads one JSON object per line. Whitespace-only lines are skipped.
pub fn read_jsonl<R: Read>(reader: R) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: "<reader>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let label = parse_label(&raw.label, line_no)?;
        records.push((line_no, Document::new(raw.id, raw.text, label)));
    }
    assemble(records)
}

pub fn write_jsonl<W: Write>(corpus: &Corpus, mut writer: W) -> std::io::Result<()> {
    for doc in corpus {
        let rec = OutRecord {
            id: &doc.id,
            text: &doc.text,
            label: doc.label.as_str(),
        };
        serde_json::to_writer(&mut writer, &rec)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    read_csv(open(path)?)
}

/// Reads RFC-4180 CSV with a header naming `id`, `text` and `label`
/// (in any column order).
pub fn read_csv<R: Read>(reader: R) -> Result<Corpus, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::Schema(format!("header is missing column {name:?}")))
    };
    let (id_col, text_col, label_col) = (column("id")?, column("text")?, column("label")?);

    let mut records = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            CorpusError::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let label = parse_label(&record[label_col], line)?;
        records.push((
            line,
            Document::new(&record[id_col], &record[text_col], label),
        ));
    }
    assemble(records)
}

pub fn write_csv<W: Write>(corpus: &Corpus, writer: W) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "text", "label"])?;
    for doc in corpus {
        wtr.write_record([doc.id.as_str(), doc.text.as_str(), doc.label.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_two_lines() {
        let data = concat!(
            r#"{"id":"1","text":"feeling low","label":"depressed"}"#,
            "\n",
            r#"{"id":"2","text":"great game","label":"control"}"#,
            "\n"
        );
        let corpus = read_jsonl(data.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.class_counts().positive, 1);
        assert_eq!(corpus.class_counts().negative, 1);
        assert_eq!(corpus.documents()[0].id, "1");
    }

    #[test]
    fn jsonl_empty() {
        let corpus = read_jsonl("".as_bytes()).unwrap();
        assert!(corpus.is_empty());
        assert_eq!(corpus.class_counts().total(), 0);
    }

    #[test]
    fn jsonl_missing_label_names_line() {
        let data = concat!(
            r#"{"id":"1","text":"a","label":"control"}"#,
            "\n",
            r#"{"id":"2","text":"b"}"#,
            "\n"
        );
        match read_jsonl(data.as_bytes()).unwrap_err() {
            CorpusError::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("label"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jsonl_unknown_label() {
        let data = r#"{"id":"1","text":"a","label":"ptsd"}"#;
        assert!(matches!(
            read_jsonl(data.as_bytes()).unwrap_err(),
            CorpusError::Label { line: 1, .. }
        ));
    }

    #[test]
    fn jsonl_duplicate_id() {
        let data = concat!(
            r#"{"id":"x","text":"a","label":"control"}"#,
            "\n\n",
            r#"{"id":"x","text":"b","label":"control"}"#
        );
        assert!(matches!(
            read_jsonl(data.as_bytes()).unwrap_err(),
            CorpusError::DuplicateId { line: 3, .. }
        ));
    }

    #[test]
    fn csv_counts() {
        let data =
            "id,text,label\n1,hello there,control\n2,so tired,depressed\n3,nice day,control\n";
        let corpus = read_csv(data.as_bytes()).unwrap();
        assert_eq!(corpus.class_counts().negative, 2);
        assert_eq!(corpus.class_counts().positive, 1);
    }

    #[test]
    fn csv_quoted_comma() {
        let data = "id,text,label\n1,\"well, I guess\",control\n";
        let corpus = read_csv(data.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus.documents()[0].text, "well, I guess");
    }

    #[test]
    fn csv_missing_text_column() {
        let data = "id,label\n1,control\n";
        assert!(matches!(
            read_csv(data.as_bytes()).unwrap_err(),
            CorpusError::Schema(_)
        ));
    }

    #[test]
    fn csv_ragged_row_is_parse_error() {
        let data = "id,text,label\n1,a,control,extra\n";
        assert!(matches!(
            read_csv(data.as_bytes()).unwrap_err(),
            CorpusError::Parse { .. }
        ));
    }

    #[test]
    fn csv_round_trip() {
        let corpus = Corpus::new(vec![
            Document::new("a", "quote \" and, comma\nnewline", Label::Positive),
            Document::new("b", "", Label::Negative),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&corpus, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), corpus);
    }
}
