pub mod cs;
pub mod eval;
pub mod phon;
pub mod pipeline;
pub mod syntax;
pub mod translit;

use anyhow::Context as _;
use lrtk::translit::RewriteRuleSet;

use crate::context::Context;

pub fn load_rules(ctx: &mut Context, spec: &str) -> anyhow::Result<RewriteRuleSet> {
    let text = ctx.resource(spec)?;
    RewriteRuleSet::parse(&text).with_context(|| format!("rule file {spec}"))
}
