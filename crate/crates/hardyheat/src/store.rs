//! Kernels shared by the checks, built once per run and persisted through
//! the cache when one is configured.

use std::collections::HashMap;
use std::sync::Arc;

use hardyheat_core::{AccuracyBudget, CouplingParams, EvalPoint, EvalResult, FreeKernel, Method, PerturbedKernel, SeriesControl};

use crate::cache::{eval_key, table_key, Cache};
use crate::error::Result;

pub struct KernelStore {
    cache: Option<Cache>,
    budget: AccuracyBudget,
    control: SeriesControl,
    free: HashMap<(u64, u64), Arc<FreeKernel>>,
    perturbed: HashMap<String, Arc<PerturbedKernel>>,
}

impl KernelStore {
    pub fn new(cache: Option<Cache>, budget: AccuracyBudget, control: SeriesControl) -> Self {
        KernelStore {
            cache,
            budget,
            control,
            free: HashMap::new(),
            perturbed: HashMap::new(),
        }
    }

    pub fn budget(&self) -> &AccuracyBudget {
        &self.budget
    }

    pub fn control(&self) -> &SeriesControl {
        &self.control
    }

    pub fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    pub fn free(&mut self, zeta: f64, alpha: f64) -> Result<Arc<FreeKernel>> {
        let key = (zeta.to_bits(), alpha.to_bits());
        if let Some(k) = self.free.get(&key) {
            return Ok(k.clone());
        }
        let k = Arc::new(FreeKernel::new(zeta, alpha)?.with_budget(&self.budget));
        self.free.insert(key, k.clone());
        Ok(k)
    }

    /// The perturbed kernel at `params`: from memory, then from the cache,
    /// else solved and stored.
    pub fn perturbed(&mut self, params: CouplingParams) -> Result<Arc<PerturbedKernel>> {
        let key = table_key(params.zeta, params.alpha, params.eta, &self.control);
        if let Some(k) = self.perturbed.get(&key) {
            return Ok(k.clone());
        }
        let tabulated = params.alpha < 2.0 && params.eta != 0.0;
        let cached = match (&mut self.cache, tabulated) {
            (Some(c), true) => c.get_table(&key),
            _ => None,
        };
        let kernel = match cached {
            Some(table) if table.params.eta == params.eta => PerturbedKernel::from_table(table, self.control)?,
            _ => {
                let k = PerturbedKernel::new(params, self.control)?;
                if let (Some(c), Some(t)) = (&mut self.cache, k.table()) {
                    c.put_table(&key, t)?;
                }
                k
            }
        };
        let kernel = Arc::new(kernel);
        self.perturbed.insert(key, kernel.clone());
        Ok(kernel)
    }

    /// A free-kernel point value through the cache (subordination and
    /// spectral values only; closed forms are cheaper than a lookup).
    pub fn free_point(&mut self, zeta: f64, alpha: f64, point: EvalPoint, method: Option<Method>) -> Result<EvalResult> {
        let k = self.free(zeta, alpha)?;
        let m = method.unwrap_or_else(|| k.default_method());
        let memo = matches!(m, Method::Subordination | Method::Spectral);
        let key = eval_key("free", zeta, alpha, 0.0, point.t, point.r, point.s, m.as_str());
        if memo {
            if let Some(c) = &mut self.cache {
                if let Some(r) = c.get_eval(&key, &self.budget) {
                    return Ok(r);
                }
            }
        }
        let r = k.eval_with(point, m)?;
        if memo {
            if let Some(c) = &mut self.cache {
                c.put_eval(&key, self.budget, r)?;
            }
        }
        Ok(r)
    }

    /// A perturbed point value through the cache.
    pub fn perturbed_point(&mut self, params: CouplingParams, point: EvalPoint) -> Result<EvalResult> {
        let key = eval_key("perturbed", params.zeta, params.alpha, params.eta, point.t, point.r, point.s, "auto");
        let memo = params.alpha < 2.0 && params.eta != 0.0;
        if memo {
            if let Some(c) = &mut self.cache {
                if let Some(r) = c.get_eval(&key, &self.budget) {
                    return Ok(r);
                }
            }
        }
        let r = self.perturbed(params)?.eval(point)?;
        if memo {
            if let Some(c) = &mut self.cache {
                c.put_eval(&key, self.budget, r)?;
            }
        }
        Ok(r)
    }

    /// A derived value (an integral of kernel values, say) through the cache
    /// under `key`.
    pub fn memo(&mut self, key: &str, compute: impl FnOnce() -> Result<EvalResult>) -> Result<EvalResult> {
        if let Some(c) = &mut self.cache {
            if let Some(r) = c.get_eval(key, &self.budget) {
                return Ok(r);
            }
        }
        let r = compute()?;
        if let Some(c) = &mut self.cache {
            c.put_eval(key, self.budget, r)?;
        }
        Ok(r)
    }
}
