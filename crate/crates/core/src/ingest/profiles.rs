//! Company profile file:
//! `company,category,row_type,region_id,group_id,members,oil_boe,gas_boe[,basis]`.
//!
//! Allocation rows bind production to a single country or basin. Aggregation
//! rows pool production over a set of countries the company cannot split,
//! with members separated by `;`. The `basis` column (operated, equity,
//! gross, ...) is carried as free text and never interpreted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_f64, read_table};
use crate::error::Result;
use crate::region::{RegionId, RegionKind, RegionRegistry};
use crate::units::ProductionVolume;

const REQUIRED: &[&str] = &[
    "company",
    "category",
    "row_type",
    "region_id",
    "group_id",
    "members",
    "oil_boe",
    "gas_boe",
];
const OPTIONAL: &[&str] = &["basis"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompanyCategory {
    Noc,
    Integrated,
    Independent,
}

impl CompanyCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompanyCategory::Noc => "noc",
            CompanyCategory::Integrated => "integrated",
            CompanyCategory::Independent => "independent",
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            CompanyCategory::Noc => "NOC",
            CompanyCategory::Integrated => "Integrated",
            CompanyCategory::Independent => "Independent",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token.to_lowercase().as_str() {
            "noc" => Some(CompanyCategory::Noc),
            "integrated" => Some(CompanyCategory::Integrated),
            "independent" => Some(CompanyCategory::Independent),
            _ => None,
        }
    }

    pub const ALL: [CompanyCategory; 3] = [
        CompanyCategory::Noc,
        CompanyCategory::Integrated,
        CompanyCategory::Independent,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub region: RegionId,
    pub production: ProductionVolume,
    pub basis: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregationGroup {
    pub group_id: String,
    pub members: Vec<RegionId>,
    pub production: ProductionVolume,
    pub basis: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanyProfile {
    pub name: String,
    pub category: CompanyCategory,
    pub allocations: Vec<Allocation>,
    pub aggregation_groups: Vec<AggregationGroup>,
}

impl CompanyProfile {
    /// Everything the company produces, covered or not.
    pub fn total_production(&self) -> ProductionVolume {
        let mut total = ProductionVolume::ZERO;
        for a in &self.allocations {
            total = total + a.production;
        }
        for g in &self.aggregation_groups {
            total = total + g.production;
        }
        total
    }
}

pub fn parse_profiles(path: &Path, registry: &RegionRegistry) -> Result<Vec<CompanyProfile>> {
    // File order of companies is preserved; rows of one company may be
    // interleaved with others but usually are not.
    let mut order: Vec<String> = Vec::new();
    let mut profiles: BTreeMap<String, CompanyProfile> = BTreeMap::new();
    let mut allocated: BTreeMap<String, BTreeSet<RegionId>> = BTreeMap::new();
    let mut grouped_members: BTreeMap<String, BTreeSet<RegionId>> = BTreeMap::new();
    let mut member_lines: Vec<(String, RegionId, u64)> = Vec::new();

    read_table(path, REQUIRED, OPTIONAL, |row| {
        let company = row.non_empty("company")?.to_string();
        let category_token = row.non_empty("category")?;
        let category = CompanyCategory::parse(category_token).ok_or_else(|| {
            row.error(format!(
                "unknown category '{category_token}' (expected noc, integrated or independent)"
            ))
        })?;
        let basis = match row.get("basis") {
            "" => None,
            b => Some(b.to_string()),
        };
        let oil = row.f64_non_negative("oil_boe")?;
        let gas = row.f64_non_negative("gas_boe")?;
        let production = ProductionVolume::new(oil, gas).map_err(|e| row.error(e.to_string()))?;

        let profile = profiles.entry(company.clone()).or_insert_with(|| {
            order.push(company.clone());
            CompanyProfile {
                name: company.clone(),
                category,
                allocations: Vec::new(),
                aggregation_groups: Vec::new(),
            }
        });
        if profile.category != category {
            return Err(row.error(format!(
                "company '{company}' listed with conflicting categories '{}' and '{category_token}'",
                profile.category.as_str()
            )));
        }

        match row.non_empty("row_type")? {
            "allocation" => {
                let region = RegionId::new(row.non_empty("region_id")?);
                if !row.get("group_id").is_empty() || !row.get("members").is_empty() {
                    return Err(row.error("allocation rows must leave group_id and members empty"));
                }
                let kind = match registry.get(&region) {
                    None => return Err(row.error(format!("unknown region '{region}'"))),
                    Some(r) => r.kind,
                };
                if kind == RegionKind::AggregationGroup {
                    return Err(row.error(format!(
                        "allocation must reference a country or basin, '{region}' is an aggregation group"
                    )));
                }
                let seen = allocated.entry(company.clone()).or_default();
                if !seen.insert(region.clone()) {
                    return Err(row.error(format!(
                        "duplicate allocation of region '{region}' for company '{company}'"
                    )));
                }
                profile.allocations.push(Allocation {
                    region,
                    production,
                    basis,
                });
            }
            "aggregation" => {
                let group_id = row.non_empty("group_id")?.to_string();
                if !row.get("region_id").is_empty() {
                    return Err(row.error("aggregation rows must leave region_id empty"));
                }
                // A group id may coincide with a registry id only when that
                // region is itself an aggregation group.
                if let Some(existing) = registry.get(&RegionId::new(group_id.as_str())) {
                    if existing.kind != RegionKind::AggregationGroup {
                        return Err(row.error(format!(
                            "group id '{group_id}' collides with registry {} '{group_id}'",
                            existing.kind.as_str()
                        )));
                    }
                }
                if profile
                    .aggregation_groups
                    .iter()
                    .any(|g| g.group_id == group_id)
                {
                    return Err(row.error(format!(
                        "duplicate aggregation group '{group_id}' for company '{company}'"
                    )));
                }
                let mut members = Vec::new();
                for token in row.non_empty("members")?.split(';') {
                    let token = token.trim();
                    if token.is_empty() {
                        return Err(row.error("empty member in aggregation group"));
                    }
                    let member = RegionId::new(token);
                    match registry.get(&member) {
                        None => return Err(row.error(format!("unknown region '{member}'"))),
                        Some(r) if r.kind != RegionKind::Country => {
                            return Err(row.error(format!(
                                "aggregation member '{member}' must be a country, got {}",
                                r.kind.as_str()
                            )))
                        }
                        Some(_) => {}
                    }
                    let seen = grouped_members.entry(company.clone()).or_default();
                    if !seen.insert(member.clone()) {
                        return Err(row.error(format!(
                            "region '{member}' appears in more than one aggregation group for company '{company}'"
                        )));
                    }
                    member_lines.push((company.clone(), member.clone(), row.line()));
                    members.push(member);
                }
                profile.aggregation_groups.push(AggregationGroup {
                    group_id,
                    members,
                    production,
                    basis,
                });
            }
            other => {
                return Err(row.error(format!(
                    "unknown row_type '{other}' (expected allocation or aggregation)"
                )))
            }
        }
        Ok(())
    })?;

    // Aggregation members must not also appear as direct allocations of the
    // same company; checked last so row order cannot hide a violation.
    for (company, member, line) in member_lines {
        if allocated
            .get(&company)
            .is_some_and(|set| set.contains(&member))
        {
            return Err(crate::error::Error::parse(
                path.display().to_string(),
                line,
                format!("region '{member}' is both allocated and grouped for company '{company}'"),
            ));
        }
    }

    Ok(order
        .into_iter()
        .map(|name| profiles.remove(&name).expect("profile recorded"))
        .collect())
}

/// Canonical serialization under the ingestion schema.
pub fn profiles_to_csv_string(profiles: &[CompanyProfile]) -> String {
    let mut out = String::from(
        "company,category,row_type,region_id,group_id,members,oil_boe,gas_boe,basis\n",
    );
    for p in profiles {
        for a in &p.allocations {
            writeln!(
                out,
                "{},{},allocation,{},,,{},{},{}",
                p.name,
                p.category.as_str(),
                a.region,
                fmt_f64(a.production.oil_boe()),
                fmt_f64(a.production.gas_boe()),
                a.basis.as_deref().unwrap_or(""),
            )
            .unwrap();
        }
        for g in &p.aggregation_groups {
            let members: Vec<&str> = g.members.iter().map(|m| m.as_str()).collect();
            writeln!(
                out,
                "{},{},aggregation,,{},{},{},{},{}",
                p.name,
                p.category.as_str(),
                g.group_id,
                members.join(";"),
                fmt_f64(g.production.oil_boe()),
                fmt_f64(g.production.gas_boe()),
                g.basis.as_deref().unwrap_or(""),
            )
            .unwrap();
        }
    }
    out
}
