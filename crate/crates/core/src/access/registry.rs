use super::{AccessPolicy, ConPa, ConPaConfig, Dcf, PolicyConfig, PolicySection, SpatialReuse};
use crate::error::{Error, Result};

pub type PolicyFactory = fn(&PolicySection) -> Result<Box<dyn AccessPolicy>>;

/// Name → constructor table for access policies.
pub struct PolicyRegistry {
    entries: Vec<(&'static str, PolicyFactory)>,
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PolicyRegistry {
    pub fn empty() -> Self {
        PolicyRegistry { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("dcf", build_dcf);
        r.register("sr", build_sr);
        r.register("conpa", build_conpa);
        r
    }

    /// Adds or replaces a policy constructor.
    pub fn register(&mut self, name: &'static str, factory: PolicyFactory) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = factory,
            None => self.entries.push((name, factory)),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn build(&self, name: &str, section: &PolicySection) -> Result<Box<dyn AccessPolicy>> {
        let (_, factory) =
            self.entries.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownPolicy(name.to_string()))?;
        factory(section)
    }

    /// Builds the policy named by `section.kind`.
    pub fn build_selected(&self, section: &PolicySection) -> Result<Box<dyn AccessPolicy>> {
        self.build(&section.kind, section)
    }
}

fn build_dcf(s: &PolicySection) -> Result<Box<dyn AccessPolicy>> {
    PolicyConfig::Dcf(s.dcf.clone()).validate(s.p_max_dbm)?;
    Ok(Box::new(Dcf { cfg: s.dcf.clone(), p_max_dbm: s.p_max_dbm }))
}

fn build_sr(s: &PolicySection) -> Result<Box<dyn AccessPolicy>> {
    PolicyConfig::Sr(s.sr.clone()).validate(s.p_max_dbm)?;
    Ok(Box::new(SpatialReuse { cfg: s.sr.clone(), p_max_dbm: s.p_max_dbm }))
}

fn build_conpa(s: &PolicySection) -> Result<Box<dyn AccessPolicy>> {
    let cfg = ConPaConfig { p_max_dbm: s.p_max_dbm, ..s.conpa.clone() };
    PolicyConfig::ConPa(cfg.clone()).validate(s.p_max_dbm)?;
    Ok(Box::new(ConPa { cfg }))
}
