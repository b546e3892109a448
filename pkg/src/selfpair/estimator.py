"""scikit-learn style front end for the synthesis pipeline."""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .blend import DEFAULT_BETA, DEFAULT_SIGMA, BlendSpec
from .copypaste import DEFAULT_MAX_ATTEMPTS, DEFAULT_MAX_INSTANCES
from .dataset_io import decode_mask, mask_kind
from .inpaint import DEFAULT_DILATION, DEFAULT_ERASE_FRACTION, DEFAULT_RADIUS
from .pipeline import STRATEGIES, PipelineConfig, Source, SynthesisReport, synthesize_dataset
from .validation import check_image, check_same_hw


def check_sources(X, y):
    """Validate parallel sequences of images and masks into ``Source`` objects.

    Masks may be binary (0/1 or 0/255) or instance-id maps.
    """
    if len(X) != len(y):
        raise ValueError(f"got {len(X)} images but {len(y)} masks")
    if len(X) == 0:
        raise ValueError("at least one source is required")
    sources = []
    for i, (image, mask) in enumerate(zip(X, y)):
        image = check_image(image, f"X[{i}]")
        mask = np.asarray(mask)
        check_same_hw(image, mask, (f"X[{i}]", f"y[{i}]"))
        label, inst = decode_mask(mask, mask_kind(mask))
        sources.append(Source(image, label, str(i), inst))
    return sources


class SelfPairSampler(BaseEstimator):
    """Generate bi-temporal change samples from single-temporal images.

    Every source image with its object mask yields ``samples_per_source``
    (pre, post, change) triples. Each triple comes from one of three
    manipulations of that same source, drawn with ``strategy_weights``:
    two disjoint crops with the second rotated, removal of objects by
    inpainting, or pasting objects between crops followed by blending.

    ``fit`` only validates and freezes the configuration; the sampler
    learns nothing from the data. Output is a deterministic function of
    the inputs and ``random_state``.

    Parameters
    ----------
    crop_size : int
        Side of the square output tiles.
    strategies : tuple of str
        Enabled subset of ``("crop", "inpaint", "copy_paste")``.
    strategy_weights : tuple of float or None
        Draw probabilities, equal when None.
    blend : {"none", "gaussian", "fourier"}
        How pasted objects are blended into their new background.
    beta, sigma : float
        Low-frequency band size for Fourier blending; Gaussian width.
    random_state : int or None
        Global seed. None draws one at fit time and stores it in ``seed_``.
    """

    def __init__(self, crop_size=256, strategies=STRATEGIES, strategy_weights=None,
                 blend="fourier", beta=DEFAULT_BETA, sigma=DEFAULT_SIGMA,
                 erase_fraction=DEFAULT_ERASE_FRACTION, dilation=DEFAULT_DILATION,
                 telea_radius=DEFAULT_RADIUS, max_instances=DEFAULT_MAX_INSTANCES,
                 max_attempts=DEFAULT_MAX_ATTEMPTS, samples_per_source=1,
                 swap_inpaint_order=False, normalize=True, random_state=0, n_jobs=None):
        self.crop_size = crop_size
        self.strategies = strategies
        self.strategy_weights = strategy_weights
        self.blend = blend
        self.beta = beta
        self.sigma = sigma
        self.erase_fraction = erase_fraction
        self.dilation = dilation
        self.telea_radius = telea_radius
        self.max_instances = max_instances
        self.max_attempts = max_attempts
        self.samples_per_source = samples_per_source
        self.swap_inpaint_order = swap_inpaint_order
        self.normalize = normalize
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _make_config(self, seed):
        weights = self.strategy_weights
        return PipelineConfig(
            crop_size=self.crop_size,
            strategies=tuple(self.strategies),
            strategy_weights=tuple(weights) if weights is not None else None,
            blend=BlendSpec(self.blend, self.beta, self.sigma),
            erase_fraction=self.erase_fraction,
            dilation=self.dilation,
            telea_radius=self.telea_radius,
            max_instances=self.max_instances,
            max_attempts=self.max_attempts,
            global_seed=seed,
            samples_per_source=self.samples_per_source,
            swap_inpaint_order=self.swap_inpaint_order,
            normalize=self.normalize,
        )

    def fit(self, X, y):
        check_sources(X, y)
        if self.random_state is None:
            seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        elif isinstance(self.random_state, (int, np.integer)):
            seed = int(self.random_state)
        else:
            raise TypeError("random_state must be an int or None; a seed is needed "
                            "to make samples reproducible")
        self.seed_ = seed
        self.config_ = self._make_config(seed)
        self.n_sources_ = len(X)
        return self

    def generate(self, X, y):
        """Iterate over ``ChangeSample`` objects for the given sources.

        Unusable sources are skipped and listed in ``report_``.
        """
        check_is_fitted(self, "config_")
        sources = check_sources(X, y)
        self.report_ = SynthesisReport()
        yield from synthesize_dataset(sources, self.config_, jobs=self.n_jobs, report=self.report_)

    def fit_resample(self, X, y):
        """Fit, then return stacked pairs and change labels.

        Returns ``pairs`` of shape (n, 2, H, W, C) holding (pre, post) and
        ``changes`` of shape (n, H, W). All samples must share one size,
        which holds with ``normalize=True`` and sources at least
        ``crop_size`` on each side.
        """
        samples = list(self.fit(X, y).generate(X, y))
        if not samples:
            raise ValueError("no sample could be synthesized")
        shapes = {s.pre.shape for s in samples}
        if len(shapes) > 1:
            raise ValueError(f"samples differ in shape: {sorted(shapes)}")
        pairs = np.stack([np.stack([s.pre, s.post]) for s in samples])
        changes = np.stack([s.change for s in samples])
        self.provenance_ = [s.provenance for s in samples]
        return pairs, changes
