#pragma once

#include <string>

#include "eegpref/config.hpp"
#include "eegpref/evaluation.hpp"
#include "eegpref/features.hpp"
#include "eegpref/preprocess.hpp"

namespace eegpref {

// Pipeline entry points behind the CLI subcommands. Errors carry a
// "[stage]" prefix naming the failing stage. Every artifact embeds the
// config digest; reruns with unchanged inputs rewrite identical bytes.

// Writes out_dir/dataset/{sNN.eegr, labels.csv, manifest.json}.
void cmd_synth(const ExperimentConfig& config);

// preprocess -> wavelet -> features. Writes out_dir/features.csv and
// out_dir/rejection_report.json; returns the matrix.
FeatureMatrix cmd_features(const ExperimentConfig& config);

// Runs the selector x classifier grid (features.csv is loaded when present,
// otherwise produced on the fly). Writes out_dir/eval_report.txt and
// out_dir/eval_report.json.
EvalReport cmd_evaluate(const ExperimentConfig& config, int threads = 1);

// Re-renders the text table from out_dir/eval_report.json.
std::string cmd_report(const ExperimentConfig& config);

// Helper shared by cmd_features / tests: full preprocessing of one recording
// (bandpass + optional notch, bad-channel screening, epoching, amplitude
// rejection, CAR).
std::vector<Epoch> preprocess_recording(Recording rec, const std::vector<LabelRow>& labels,
                                        const ExperimentConfig& config, RejectionReport& report);

}  // namespace eegpref
