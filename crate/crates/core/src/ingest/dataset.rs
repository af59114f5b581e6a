use super::IngestError;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Header plus rows of string cells, all rows the width of the header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub provenance: String,
}

impl Dataset {
    pub fn column_index(&self, name: &str) -> Result<usize, IngestError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<impl Iterator<Item = &str> + '_, IngestError> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(move |r| r[i].as_str()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// RFC 4180 CSV with a mandatory header row.
pub fn read_dataset(reader: impl Read, provenance: &str) -> Result<Dataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers().map_err(IngestError::from_csv)?.clone();
    if header.is_empty() {
        return Err(IngestError::MissingHeader);
    }
    let columns: Vec<String> = header.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(IngestError::from_csv)?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Dataset {
        columns,
        rows,
        provenance: provenance.to_string(),
    })
}

pub fn read_dataset_file(path: &Path) -> Result<Dataset, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_dataset(std::io::BufReader::new(file), &path.display().to_string())
}

pub fn write_dataset(ds: &Dataset, writer: impl Write) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| IngestError::Csv(e.to_string());
    w.write_record(&ds.columns).map_err(err)?;
    for row in &ds.rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|e| IngestError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_only_file_has_no_rows() {
        let ds = read_dataset("a,b\n".as_bytes(), "mem").unwrap();
        assert_eq!(ds.columns, vec!["a", "b"]);
        assert!(ds.is_empty());
    }

    #[test]
    fn quoted_commas_stay_in_one_cell() {
        let ds = read_dataset("a,b\n\"x,1\",2".as_bytes(), "mem").unwrap();
        assert_eq!(ds.rows, vec![vec!["x,1".to_string(), "2".to_string()]]);
    }

    #[test]
    fn doubled_quotes_unescape() {
        let ds = read_dataset("a\n\"say \"\"hi\"\"\"\n".as_bytes(), "mem").unwrap();
        assert_eq!(ds.rows[0][0], "say \"hi\"");
    }

    #[test]
    fn ragged_row_names_row_number() {
        let err = read_dataset("a,b\n1\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, IngestError::Ragged { row: 2, expected: 2, found: 1 }));
        assert_eq!(err.to_string(), "row 2: expected 2 fields, found 1");

        let err = read_dataset("a,b\n1,2\n3,4\n5,6,7\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, IngestError::Ragged { row: 4, .. }));
    }

    #[test]
    fn empty_input_is_missing_header() {
        assert!(matches!(
            read_dataset("".as_bytes(), "mem"),
            Err(IngestError::MissingHeader)
        ));
    }

    #[test]
    fn invalid_utf8_is_reported() {
        let bytes = b"a,b\n1,\xff\n";
        assert!(matches!(
            read_dataset(&bytes[..], "mem"),
            Err(IngestError::InvalidUtf8 { row: 2 })
        ));
    }

    proptest! {
        #[test]
        fn write_then_read_preserves_cells(
            cols in 1usize..5,
            cells in prop::collection::vec(".*", 0..40),
            names in prop::collection::vec("[a-z]{1,6}", 5),
        ) {
            let columns: Vec<String> = names[..cols].to_vec();
            let rows: Vec<Vec<String>> = cells
                .chunks_exact(cols)
                .map(|c| c.to_vec())
                .collect();
            let ds = Dataset { columns, rows, provenance: "mem".into() };
            let mut buf = Vec::new();
            write_dataset(&ds, &mut buf).unwrap();
            let back = read_dataset(&buf[..], "mem").unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
