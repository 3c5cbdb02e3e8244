use serde::{Deserialize, Serialize};

use crate::instance::{InstanceFile, FORMAT};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub cosets: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    pub result: serde_json::Value,
    pub summary: String,
}

impl Report {
    pub fn new(command: &str, instance: Option<InstanceFile>, result: serde_json::Value, summary: String) -> Report {
        Report { format: FORMAT, command: command.to_string(), instance, normalization: None, result, summary }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn parse(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }
}
