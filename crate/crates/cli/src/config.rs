use std::path::Path;

use anyhow::Context;
use clap::Args;
use mgsat::inference::{CostSpec, CostTerm, InferenceConfig};
use mgsat::RelationMatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatchArg {
    Strict,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CostArg {
    Entries,
    Features,
    SelectorCategories,
}

/// Overrides for every configuration field. Unset flags keep the value
/// from `--config`, or the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with configuration fields (see README).
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    #[arg(long)]
    pub max_feats: Option<usize>,
    #[arg(long)]
    pub max_phrasal_moves: Option<usize>,
    #[arg(long)]
    pub max_head_moves: Option<usize>,
    /// Covert complementizer leaves per derivation.
    #[arg(long)]
    pub covert_budget: Option<usize>,
    /// Lexicon slots available to the encoder.
    #[arg(long)]
    pub max_items: Option<usize>,
    /// Selectional categories (K).
    #[arg(long)]
    pub categories: Option<usize>,
    #[arg(long)]
    pub licensing_categories: Option<usize>,
    #[arg(long, value_enum)]
    pub relation_match: Option<MatchArg>,
    /// Require the covert complementizer to head each derivation.
    #[arg(long)]
    pub covert_root: Option<bool>,
    #[arg(long)]
    pub slot_symmetry: Option<bool>,
    #[arg(long)]
    pub category_symmetry: Option<bool>,
    #[arg(long)]
    pub universal_categories: Option<bool>,
    /// Cost terms in priority order, comma separated; empty for none.
    #[arg(long, value_enum, value_delimiter = ',', num_args = 0..)]
    pub costs: Option<Vec<CostArg>>,
    /// Number of optimal lexicons to sample.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Conflicts per solver call.
    #[arg(long)]
    pub conflict_budget: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_budget: Option<u64>,
    /// Axiom group to leave out (repeatable), e.g. `smc` or `typing@2`.
    #[arg(long = "disable", value_name = "GROUP")]
    pub disable: Vec<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> anyhow::Result<InferenceConfig> {
        let mut c = match &self.config {
            Some(p) => load(p)?,
            None => InferenceConfig::default(),
        };
        let b = &mut c.encoder.bounds;
        set(&mut b.max_feats, self.max_feats);
        set(&mut b.max_phrasal_moves, self.max_phrasal_moves);
        set(&mut b.max_head_moves, self.max_head_moves);
        set(&mut b.covert_budget, self.covert_budget);
        let e = &mut c.encoder;
        set(&mut e.max_items, self.max_items);
        set(&mut e.categories, self.categories);
        set(&mut e.licensing_categories, self.licensing_categories);
        set(
            &mut e.relation_match,
            self.relation_match.map(|m| match m {
                MatchArg::Strict => RelationMatch::Strict,
                MatchArg::Local => RelationMatch::Local,
            }),
        );
        set(&mut e.covert_root, self.covert_root);
        set(&mut e.slot_symmetry, self.slot_symmetry);
        set(&mut e.category_symmetry, self.category_symmetry);
        set(&mut e.universal_categories, self.universal_categories);
        if let Some(costs) = &self.costs {
            c.costs = CostSpec(
                costs
                    .iter()
                    .map(|t| match t {
                        CostArg::Entries => CostTerm::Entries,
                        CostArg::Features => CostTerm::Features,
                        CostArg::SelectorCategories => CostTerm::SelectorCategories,
                    })
                    .collect(),
            );
        }
        set(&mut c.samples, self.samples);
        set(&mut c.seed, self.seed);
        if self.conflict_budget.is_some() {
            c.conflict_budget = self.conflict_budget;
        }
        if self.time_budget.is_some() {
            c.time_budget = self.time_budget;
        }
        c.disabled_groups.extend(self.disable.iter().cloned());
        check(&c)?;
        Ok(c)
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn load(path: &Path) -> anyhow::Result<InferenceConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check(c: &InferenceConfig) -> anyhow::Result<()> {
    let b = &c.encoder.bounds;
    let e = &c.encoder;
    for (name, v) in [
        ("max-feats", b.max_feats),
        ("max-items", e.max_items),
        ("categories", e.categories),
        ("samples", c.samples),
    ] {
        anyhow::ensure!(v > 0, "{name} must be positive");
    }
    Ok(())
}
