//! JSON interchange formats for fields, codes and search results.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, AmbientSpec};
use crate::codes::{Code, Family, Kind, Params};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linpoly::Setting;
use crate::subspace::Subspace;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn of(field: &Field) -> FieldSpec {
        FieldSpec { p: field.p(), e: field.step(), n: field.n(), modulus: field.modulus().to_vec() }
    }

    /// Rebuilds the field and checks that the recorded modulus matches.
    pub fn build(&self) -> Result<Field> {
        let field = Field::new(self.p, self.e, self.n)?;
        if field.modulus() != self.modulus.as_slice() {
            return Err(Error::Malformed(format!(
                "modulus {:?} differs from the canonical {:?}",
                self.modulus,
                field.modulus()
            )));
        }
        Ok(field)
    }
}

fn parse_setting(name: &str) -> Result<Option<Setting>> {
    Ok(match name {
        "linear" => None,
        "symmetric" => Some(Setting::Symmetric),
        "alternating" => Some(Setting::Alternating),
        "hermitian" => Some(Setting::Hermitian),
        other => return Err(Error::Malformed(format!("unknown setting {other:?}"))),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub schema: u32,
    pub family: Family,
    pub params: Params,
    pub field: FieldSpec,
    pub ambient: AmbientSpec,
    pub kind: Kind,
    pub basis_rows: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<u32>>,
}

impl CodeFile {
    pub fn from_code(code: &Code) -> CodeFile {
        CodeFile {
            schema: SCHEMA,
            family: code.family,
            params: code.params.clone(),
            field: FieldSpec::of(code.field()),
            ambient: code.ambient.spec(),
            kind: code.kind,
            basis_rows: code.basis.rows().iter().map(|r| r.iter().map(|c| c.0).collect()).collect(),
            complement: code.complement.as_ref().map(|v| v.iter().map(|c| c.0).collect()),
        }
    }

    pub fn into_code(self) -> Result<Code> {
        if self.schema != SCHEMA {
            return Err(Error::Malformed(format!("unsupported schema {}", self.schema)));
        }
        let field = Arc::new(self.field.build()?);
        let setting = parse_setting(&self.ambient.setting)?;
        let p = field.p() as u64;
        let scalar_degree = (1..=field.step()).find(|&k| p.pow(k) == self.ambient.q).ok_or_else(|| {
            Error::Malformed(format!("q = {} is not a subfield order of the field", self.ambient.q))
        })?;
        let ambient = if scalar_degree * 2 == field.step() && setting.is_none() {
            Ambient::hermitian_full(&field)?
        } else {
            Ambient::new(&field, setting)?
        };
        if ambient.scalar_degree() != scalar_degree || ambient.n() as u32 != self.ambient.n {
            return Err(Error::Malformed("ambient header does not match the field".into()));
        }
        let rows: Vec<Vec<Elem>> = self.basis_rows.into_iter().map(|r| r.into_iter().map(Elem).collect()).collect();
        let len = match self.kind {
            Kind::Linpoly => ambient.vector_len(),
            Kind::GramOnV => (self.params.n as usize).pow(2),
        };
        let basis = Subspace::span(&field, scalar_degree, len, &rows)?;
        if basis.dim() != rows.len() {
            return Err(Error::Malformed("basis rows are linearly dependent".into()));
        }
        let complement = match self.complement {
            Some(v) => Some(v.into_iter().map(|x| field.check(Elem(x))).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Ok(Code { family: self.family, params: self.params, ambient, kind: self.kind, basis, complement })
    }
}

pub fn code_to_json(code: &Code) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CodeFile::from_code(code))?)
}

pub fn code_from_json(text: &str) -> Result<Code> {
    serde_json::from_str::<CodeFile>(text)?.into_code()
}

pub fn save_code(code: &Code, path: &Path) -> Result<()> {
    std::fs::write(path, code_to_json(code)? + "\n")?;
    Ok(())
}

pub fn load_code(path: &Path) -> Result<Code> {
    code_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
