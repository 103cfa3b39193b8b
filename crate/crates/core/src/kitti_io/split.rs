use std::collections::HashSet;

use crate::error::{Error, Result};

/// Frame ids from a split file, one per line, in file order.
///
/// Surrounding whitespace and blank lines are ignored; a repeated id is an
/// error.
pub fn load_split(text: &str) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let id = line.trim();
        if id.is_empty() {
            continue;
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateFrame {
                line: i + 1,
                id: id.to_string(),
            });
        }
        ids.push(id.to_string());
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_order() {
        assert_eq!(load_split("000000\n000003\n").unwrap(), vec!["000000", "000003"]);
        assert_eq!(load_split("000003\r\n000000").unwrap(), vec!["000003", "000000"]);
    }

    #[test]
    fn empty() {
        assert!(load_split("").unwrap().is_empty());
    }

    #[test]
    fn duplicate() {
        match load_split("000001\n000001") {
            Err(Error::DuplicateFrame { line: 2, id }) => assert_eq!(id, "000001"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
