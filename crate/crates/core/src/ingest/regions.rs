//! Region registry file: `region_id,kind,parent_id,display_name`.

use std::path::Path;

use super::read_table;
use crate::error::Result;
use crate::region::{Region, RegionId, RegionKind, RegionRegistry};

const REQUIRED: &[&str] = &["region_id", "kind", "parent_id", "display_name"];

pub fn parse_regions(path: &Path) -> Result<RegionRegistry> {
    let mut registry = RegionRegistry::new();
    read_table(path, REQUIRED, &[], |row| {
        let id = RegionId::new(row.non_empty("region_id")?);
        let kind_token = row.non_empty("kind")?;
        let kind = RegionKind::parse(kind_token)
            .ok_or_else(|| row.error(format!("unknown region kind '{kind_token}'")))?;
        let parent = match row.get("parent_id") {
            "" => None,
            p => Some(RegionId::new(p)),
        };
        let display_name = row.non_empty("display_name")?.to_string();
        registry
            .insert(Region {
                id,
                kind,
                parent,
                display_name,
            })
            .map_err(|e| row.error(e.to_string()))
    })?;

    // Parent links are checked after the whole file is read so declaration
    // order does not matter.
    registry
        .validate()
        .map_err(|e| crate::error::Error::parse(path.display().to_string(), 1, e.to_string()))?;
    Ok(registry)
}
