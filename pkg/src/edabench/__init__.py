"""EDA-only activity-state classification pipeline.

Filter and decompose 4 Hz electrodermal signals, extract a 25-feature
catalog, select features by correlation pruning + RFE, and evaluate a
from-scratch classifier suite under LOSO and stratified k-fold CV.
"""

__version__ = "0.1.0"

from .ingest import (Condition, Experiment, Manifest, RawRecording, Segment,
                     WindowSpec, builtin_windows, load_manifest,
                     load_recording, parse_e4_csv, parse_plain, slice_window)
from .dsp import (DecomposedSignal, FilterCoefficients, FilterKind, decompose,
                  design_butterworth, filtfilt, frequency_response,
                  minmax_normalize)
from .spectral import (PsdEstimate, band_power, count_spectral_peaks,
                       second_spectral_peak, welch_psd)
from .features import (FEATURE_CATALOG, FeatureVector, ScrEvent,
                       detect_scr_peaks, extract_all)
from .select import (FeatureMatrix, SelectionReport, apply_preprocess,
                     correlation_prune, drop_near_constant, fit_preprocess,
                     global_selection, rfe_rank)
from .models import ModelSpec, fit
from .learn import (ConfusionMatrix, CvReport, CvScheme, confusion,
                    loso_folds, metrics, run_cv, stratified_kfold)
from .synth import SynthEvent, SynthSpec, SynthTruth, generate
from .pipeline import ExperimentConfig, build_feature_matrix, run_experiment
