//! Resolution of the `--model`/`--symbol` input surface into a symbol
//! plus whatever extra structure the model carries (companion SDE,
//! closed forms).

use crate::args::{InputArgs, ModelKind};
use crate::bundle::Provenance;
use crate::table::parse_list;
use crate::CliError;
use quadgap_core::models::{chains_model, gle_model, kfp_model, LinearSDE, ModelError};
use quadgap_core::symbol::{QuadraticSymbol, SymbolFile};

/// Model-specific extras the generic pipeline cannot reconstruct.
#[derive(Debug, Clone)]
pub enum ModelDetail {
    Kfp { a: f64 },
    Chains { m_c: f64 },
    Gle { omega: f64, beta: f64, alphas: Vec<f64>, lambdas: Vec<f64> },
    External,
}

#[derive(Debug)]
pub struct ResolvedInput {
    pub symbol: QuadraticSymbol,
    pub provenance: Provenance,
    /// Companion SDE when the model defines one (kfp, gle).
    pub sde: Option<LinearSDE>,
    pub detail: ModelDetail,
}

fn domain(e: ModelError) -> CliError {
    CliError::Domain(e.to_string())
}

/// Turn the input flags into a symbol. Exactly one of `--model` /
/// `--symbol` must be present.
pub fn resolve(args: &InputArgs) -> Result<ResolvedInput, CliError> {
    if let Some(path) = &args.symbol {
        let text = std::fs::read_to_string(path)?;
        let file: SymbolFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        let symbol = file
            .into_symbol()
            .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        return Ok(ResolvedInput {
            symbol,
            provenance: Provenance::File { path: path.display().to_string() },
            sde: None,
            detail: ModelDetail::External,
        });
    }

    let Some(kind) = args.model else {
        return Err(CliError::Domain(
            "no input: pass --model {kfp|chains|gle} or --symbol <file>".into(),
        ));
    };

    match kind {
        ModelKind::Kfp => {
            let m = kfp_model(args.a).map_err(domain)?;
            Ok(ResolvedInput {
                symbol: m.symbol,
                provenance: Provenance::Model {
                    name: "kfp".into(),
                    params: vec![("a".into(), args.a)],
                },
                sde: Some(m.sde),
                detail: ModelDetail::Kfp { a: args.a },
            })
        }
        ModelKind::Chains => {
            let m = chains_model(args.a, args.b, args.c, args.alpha, args.alpha1, args.alpha2)
                .map_err(domain)?;
            Ok(ResolvedInput {
                symbol: m.symbol,
                provenance: Provenance::Model {
                    name: "chains".into(),
                    params: vec![
                        ("a".into(), args.a),
                        ("b".into(), args.b),
                        ("c".into(), args.c),
                        ("alpha".into(), args.alpha),
                        ("alpha1".into(), args.alpha1),
                        ("alpha2".into(), args.alpha2),
                    ],
                },
                sde: None,
                detail: ModelDetail::Chains { m_c: m.m_c },
            })
        }
        ModelKind::Gle => {
            let (alphas, lambdas) = gle_mode_lists(args)?;
            let m = gle_model(args.omega, args.beta, &alphas, &lambdas).map_err(domain)?;
            let mut params = vec![("omega".into(), args.omega), ("beta".into(), args.beta)];
            for (j, &a) in alphas.iter().enumerate() {
                params.push((format!("alpha{}", j + 1), a));
            }
            for (j, &l) in lambdas.iter().enumerate() {
                params.push((format!("lambda{}", j + 1), l));
            }
            Ok(ResolvedInput {
                symbol: m.symbol,
                provenance: Provenance::Model { name: "gle".into(), params },
                sde: Some(m.sde),
                detail: ModelDetail::Gle {
                    omega: args.omega,
                    beta: args.beta,
                    alphas,
                    lambdas,
                },
            })
        }
    }
}

/// `--alphas`/`--lambdas` when given, else unit couplings for `--m`
/// modes. A single explicit list fixes the mode count for the other.
fn gle_mode_lists(args: &InputArgs) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let alphas = args.alphas.as_deref().map(parse_list).transpose()?;
    let lambdas = args.lambdas.as_deref().map(parse_list).transpose()?;
    let m = alphas
        .as_ref()
        .map(Vec::len)
        .or_else(|| lambdas.as_ref().map(Vec::len))
        .unwrap_or(args.m);
    if m == 0 {
        return Err(CliError::Domain("gle needs at least one bath mode".into()));
    }
    Ok((alphas.unwrap_or_else(|| vec![1.0; m]), lambdas.unwrap_or_else(|| vec![1.0; m])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn input_of(argv: &[&str]) -> InputArgs {
        let cli = crate::Cli::parse_from(argv);
        match cli.command {
            crate::Command::Analyze(a) => a.input,
            _ => panic!("test expects analyze"),
        }
    }

    #[test]
    fn kfp_resolves_with_sde() {
        let r = resolve(&input_of(&["quadgap", "analyze", "--model", "kfp", "--a", "2"]))
            .unwrap();
        assert_eq!(r.symbol.dim().n(), 2);
        assert!(r.sde.is_some());
        assert!(matches!(r.detail, ModelDetail::Kfp { a } if a == 2.0));
    }

    #[test]
    fn gle_mode_count_from_m_and_lists() {
        let r = resolve(&input_of(&["quadgap", "analyze", "--model", "gle", "--m", "3"]))
            .unwrap();
        assert_eq!(r.symbol.dim().n(), 5);

        let r = resolve(&input_of(&[
            "quadgap", "analyze", "--model", "gle", "--alphas", "1,2", "--lambdas", "0.5,1.5",
        ]))
        .unwrap();
        assert_eq!(r.symbol.dim().n(), 4);
        let ModelDetail::Gle { alphas, lambdas, .. } = r.detail else { panic!() };
        assert_eq!(alphas, vec![1.0, 2.0]);
        assert_eq!(lambdas, vec![0.5, 1.5]);
    }

    #[test]
    fn missing_input_is_a_domain_error() {
        let err = resolve(&input_of(&["quadgap", "analyze"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn zero_kfp_parameter_is_rejected() {
        let err = resolve(&input_of(&["quadgap", "analyze", "--model", "kfp", "--a", "0"]))
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    // The bundled files must stay exact mirrors of the in-code models
    // (all entries are dyadic, so equality is exact).
    #[test]
    fn bundled_assets_match_the_model_constructors() {
        let asset = |name: &str| {
            format!("{}/assets/{name}", env!("CARGO_MANIFEST_DIR"))
        };
        let kfp = resolve(&input_of(&["quadgap", "analyze", "--symbol", &asset("kfp_a1.json")]))
            .unwrap();
        assert_eq!(
            kfp.symbol.q(),
            quadgap_core::models::kfp_model(1.0).unwrap().symbol.q()
        );

        let gle = resolve(&input_of(&["quadgap", "analyze", "--symbol", &asset("gle_m1.json")]))
            .unwrap();
        assert_eq!(
            gle.symbol.q(),
            quadgap_core::models::gle_model(1.0, 1.0, &[1.0], &[1.0]).unwrap().symbol.q()
        );

        let ho = resolve(&input_of(&[
            "quadgap",
            "analyze",
            "--symbol",
            &asset("harmonic_oscillator.json"),
        ]))
        .unwrap();
        assert_eq!(ho.symbol.dim().n(), 1);
        assert_eq!(ho.symbol.re_q(), quadgap_core::RMat::identity(2, 2));
    }
}
