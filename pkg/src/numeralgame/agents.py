"""Speaker and listener LSTM policies trained with REINFORCE.

Both agents are small recurrent networks written directly in numpy (forward
pass, backpropagation through time and Adam), which keeps a training step
cheap on one CPU core and makes runs bit-reproducible for a given seed.

The speaker reads an expression one symbol at a time and emits one message
symbol per input symbol.  The listener reads the whole message and guesses a
numeral in ``1..numeral_range``.  Reward is 1 for an exact guess, else 0.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from numeralgame.grammar import OPERATORS, NumExpr, symbols
from numeralgame.lexicon import Lexicon
from numeralgame.metrics import NeedDistribution

CHECKPOINT_FORMAT = "numeralgame-agents"
CHECKPOINT_VERSION = 1


@dataclass
class AgentConfig:
    embedding_dim: int = 5
    hidden_dim: int = 100
    learning_rate: float = 0.002
    batch_size: int = 32
    message_alphabet_size: int = 64
    entropy_coefficient: float = 0.01
    # entropy bonus for the speaker's per-step distributions; 0 leaves it unregularised
    speaker_entropy: float = 0.0
    numeral_range: int = 50
    init_scale: float = 0.1
    # when set, embedding rows are drawn from N(0, embedding_init_std) instead
    embedding_init_std: float | None = None
    pretrain_epochs: int = 5000

    def __post_init__(self):
        for name in ("embedding_dim", "hidden_dim", "batch_size", "message_alphabet_size", "numeral_range"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


class Vocabulary:
    """Expression symbols keyed by absolute value: numerals ``1..max_numeral`` then operators.

    Id 0 is padding.  Keying by value keeps a numeral's embedding row stable
    when it moves between D and M or the grammar changes around it.
    """

    def __init__(self, max_numeral: int):
        self.max_numeral = max_numeral
        self.operator_ids = {op: max_numeral + 1 + i for i, op in enumerate(OPERATORS)}

    def __len__(self):
        return self.max_numeral + 1 + len(OPERATORS)

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and other.max_numeral == self.max_numeral

    def symbol_id(self, sym: str) -> int:
        if sym in self.operator_ids:
            return self.operator_ids[sym]
        n = int(sym)
        if not 1 <= n <= self.max_numeral:
            raise KeyError(f"numeral {n} is outside the vocabulary 1..{self.max_numeral}")
        return n


def tokenize(expr: NumExpr, vocab: Vocabulary) -> list[int]:
    """Symbol ids in rendering order; one id per symbol of ``expr``."""
    return [vocab.symbol_id(s) for s in symbols(expr)]


@dataclass
class TokenTable:
    """Padded token ids of a lexicon's expressions, row ``n - 1`` for numeral ``n``."""

    tokens: np.ndarray
    lengths: np.ndarray

    @classmethod
    def from_lexicon(cls, lexicon: Lexicon, vocab: Vocabulary, n_max: int | None = None) -> "TokenTable":
        n_max = n_max or lexicon.dm.range_max
        seqs = [tokenize(lexicon[n], vocab) for n in range(1, n_max + 1)]
        width = max(len(s) for s in seqs)
        tokens = np.zeros((n_max, width), dtype=np.int64)
        for i, s in enumerate(seqs):
            tokens[i, : len(s)] = s
        return cls(tokens, np.array([len(s) for s in seqs], dtype=np.int64))

    def batch(self, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lengths = self.lengths[targets - 1]
        return self.tokens[targets - 1, : lengths.max()], lengths


def _log_softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


class RecurrentPolicy:
    """Embedding -> single LSTM layer -> linear head, parameters in one flat vector."""

    def __init__(self, n_inputs: int, n_outputs: int, embedding_dim: int, hidden_dim: int,
                 rng: np.random.Generator, init_scale: float = 0.1,
                 embedding_init_std: float | None = None):
        self.n_inputs, self.n_outputs = n_inputs, n_outputs
        self.embedding_dim, self.hidden_dim = embedding_dim, hidden_dim
        H, e = hidden_dim, embedding_dim
        self.shapes = {
            "embedding": (n_inputs, e),
            "w_input": (e, 4 * H),
            "w_hidden": (H, 4 * H),
            "bias": (4 * H,),
            "w_out": (H, n_outputs),
            "b_out": (n_outputs,),
        }
        self._slices = {}
        offset = 0
        for name, shape in self.shapes.items():
            n = int(np.prod(shape))
            self._slices[name] = (slice(offset, offset + n), shape)
            offset += n
        self.theta = rng.uniform(-init_scale, init_scale, offset)
        for name, view in self.split(self.theta).items():
            setattr(self, name, view)
        if embedding_init_std is not None:
            self.embedding[...] = rng.normal(0.0, embedding_init_std, self.embedding.shape)

    def split(self, flat: np.ndarray) -> dict[str, np.ndarray]:
        """Named views into a flat vector laid out like ``theta``."""
        return {name: flat[sl].reshape(shape) for name, (sl, shape) in self._slices.items()}

    def set_theta(self, theta: np.ndarray):
        self.theta[...] = theta

    def run(self, inputs: np.ndarray, lengths: np.ndarray | None = None) -> dict:
        """LSTM over ``inputs`` (batch x time ids); returns a cache for :meth:`backward`.

        With ``lengths``, steps past a row's length are skipped and their
        hidden states left at zero; rows are processed longest first so each
        step touches a contiguous block.
        """
        B, T = inputs.shape
        H = self.hidden_dim
        if lengths is None:
            lengths = np.full(B, T)
        order = np.argsort(-lengths, kind="stable")
        active = (lengths[order][None, :] > np.arange(T)[:, None]).sum(axis=1)
        inputs_sorted = inputs[order]
        # sigmoid(x) = 0.5 * tanh(x / 2) + 0.5, so all four gates take one tanh
        scale = self._gate_scale
        xs = self.embedding[inputs_sorted]
        gates_in = (xs @ self.w_input + self.bias).transpose(1, 0, 2) * scale
        w_hidden = self.w_hidden * scale
        hs = np.zeros((T, B, H))
        cs = np.zeros((T, B, H))
        acts = np.zeros((T, B, 4 * H))
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        for t in range(T):
            n = active[t]
            a = acts[t, :n]
            np.tanh(gates_in[t, :n] + h[:n] @ w_hidden, out=a)
            a[:, : 3 * H] *= 0.5
            a[:, : 3 * H] += 0.5
            c = a[:, H : 2 * H] * c[:n] + a[:, :H] * a[:, 3 * H :]
            cs[t, :n] = c
            h = hs[t, :n]
            np.tanh(c, out=h)
            h *= a[:, 2 * H : 3 * H]
        inverse = np.empty_like(order)
        inverse[order] = np.arange(B)
        return {"inputs": inputs_sorted, "xs": xs, "hs_sorted": hs, "cs": cs, "acts": acts,
                "active": active, "order": order, "hs": hs[:, inverse]}

    @property
    def _gate_scale(self) -> np.ndarray:
        H = self.hidden_dim
        return np.concatenate([np.full(3 * H, 0.5), np.ones(H)])

    def backward(self, cache: dict, d_hs: np.ndarray) -> np.ndarray:
        """Gradient of the loss wrt ``theta`` given its gradient wrt each hidden state.

        ``d_hs`` has shape (time, batch, hidden) in the caller's row order and
        excludes the head, whose gradient the caller accumulates into the
        returned vector itself.
        """
        grad = np.zeros_like(self.theta)
        g = self.split(grad)
        hs, cs, acts, xs = cache["hs_sorted"], cache["cs"], cache["acts"], cache["xs"]
        active = cache["active"]
        d_hs = d_hs[:, cache["order"]]
        T, B, H = hs.shape
        # local derivatives of every gate activation, and of h wrt c
        dact = acts * (1.0 - acts)
        dact[..., 3 * H :] = 1.0 - acts[..., 3 * H :] ** 2
        tcs = np.tanh(cs)
        dh_dc = acts[..., 2 * H : 3 * H] * (1.0 - tcs * tcs)
        # upstream factor multiplying each gate's derivative: (g, c_prev, tanh c, i)
        up = np.empty((T, B, 4 * H))
        up[..., :H] = acts[..., 3 * H :]
        up[0, :, H : 2 * H] = 0.0
        up[1:, :, H : 2 * H] = cs[:-1]
        up[..., 2 * H : 3 * H] = tcs
        up[..., 3 * H :] = acts[..., :H]
        up *= dact
        forget = acts[..., H : 2 * H]
        w_hidden_t = self.w_hidden.T
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        dz = np.zeros((T, B, 4 * H))
        for t in range(T - 1, -1, -1):
            n = active[t]
            dh = d_hs[t, :n] + dh_next[:n]
            dc = dc_next[:n] + dh * dh_dc[t, :n]
            dc_next[:n] = dc * forget[t, :n]
            z = dz[t, :n]
            z[:, :H] = dc
            z[:, H : 2 * H] = dc
            z[:, 2 * H : 3 * H] = dh
            z[:, 3 * H :] = dc
            z *= up[t, :n]
            dh_next[:n] = z @ w_hidden_t
        flat_dz = dz.reshape(T * B, 4 * H)
        if T > 1:
            g["w_hidden"][...] = hs[:-1].reshape(-1, H).T @ flat_dz[B:]
        xs_tb = xs.transpose(1, 0, 2).reshape(T * B, -1)
        g["w_input"][...] = xs_tb.T @ flat_dz
        g["bias"][...] = flat_dz.sum(axis=0)
        dx = flat_dz @ self.w_input.T
        np.add.at(g["embedding"], cache["inputs"].T.reshape(-1), dx)
        return grad


class SpeakerPolicy(RecurrentPolicy):
    def __init__(self, vocab: Vocabulary, config: AgentConfig, rng: np.random.Generator):
        super().__init__(len(vocab), config.message_alphabet_size, config.embedding_dim,
                         config.hidden_dim, rng, config.init_scale, config.embedding_init_std)
        self.vocab = vocab


class ListenerPolicy(RecurrentPolicy):
    def __init__(self, config: AgentConfig, rng: np.random.Generator):
        super().__init__(config.message_alphabet_size, config.numeral_range, config.embedding_dim,
                         config.hidden_dim, rng, config.init_scale, config.embedding_init_std)
        self.numeral_range = config.numeral_range


def _sample(logp: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draw along the last axis."""
    cdf = np.cumsum(np.exp(logp), axis=-1)
    u = rng.random(logp.shape[:-1] + (1,)) * cdf[..., -1:]
    return np.minimum((cdf < u).sum(axis=-1), logp.shape[-1] - 1)


def speaker_forward(speaker: SpeakerPolicy, tokens: np.ndarray):
    cache = speaker.run(tokens, (tokens != 0).sum(axis=1))
    logits = cache["hs"].transpose(1, 0, 2) @ speaker.w_out + speaker.b_out
    return _log_softmax(logits), cache


def listener_forward(listener: ListenerPolicy, messages: np.ndarray, lengths: np.ndarray):
    cache = listener.run(messages, lengths)
    last = cache["hs"][lengths - 1, np.arange(len(lengths))]
    logits = last @ listener.w_out + listener.b_out
    return _log_softmax(logits), cache


def _mask(lengths: np.ndarray, width: int) -> np.ndarray:
    return np.arange(width)[None, :] < lengths[:, None]


def speak(speaker: SpeakerPolicy, tokens, rng: np.random.Generator | None = None,
          mode: str = "sample"):
    """Message for one token sequence.

    Returns ``(message, log_probs)`` for a single sequence, where log_probs
    are those of the chosen symbols.
    """
    tokens = np.asarray(tokens, dtype=np.int64)[None, :]
    logp, _ = speaker_forward(speaker, tokens)
    msg = _choose(logp, rng, mode)
    return msg[0], np.take_along_axis(logp, msg[..., None], -1)[0, :, 0]


def listen(listener: ListenerPolicy, message, rng: np.random.Generator | None = None,
           mode: str = "sample"):
    """Guess a numeral for one message; returns ``(guess, log_prob, entropy)``."""
    message = np.asarray(message, dtype=np.int64)[None, :]
    logp, _ = listener_forward(listener, message, np.array([message.shape[1]]))
    choice = int(_choose(logp, rng, mode)[0])
    entropy = float(-(np.exp(logp[0]) * logp[0]).sum())
    return choice + 1, float(logp[0, choice]), entropy


def _choose(logp, rng, mode):
    if mode == "greedy":
        return logp.argmax(axis=-1)
    if mode != "sample":
        raise ValueError(f"mode must be 'sample' or 'greedy', got {mode!r}")
    if rng is None:
        raise ValueError("sample mode needs an rng")
    return _sample(logp, rng)


@dataclass
class EpisodeBatch:
    targets: np.ndarray
    tokens: np.ndarray
    lengths: np.ndarray
    messages: np.ndarray
    guesses: np.ndarray
    rewards: np.ndarray
    speaker_log_probs: np.ndarray  # chosen symbols, zero beyond each length
    listener_log_probs: np.ndarray
    listener_entropy: np.ndarray
    _caches: dict = field(default_factory=dict, repr=False)

    @property
    def mean_reward(self) -> float:
        return float(self.rewards.mean())


def sample_targets(dist: NeedDistribution, numeral_range: int, size: int,
                   rng: np.random.Generator) -> np.ndarray:
    """I.i.d. numerals from the need distribution renormalised on ``1..numeral_range``."""
    w = dist.restricted(min(numeral_range, dist.n_max)).weights
    return rng.choice(np.arange(1, len(w) + 1), size=size, p=w)


def play_targets(speaker: SpeakerPolicy, listener: ListenerPolicy, table: TokenTable,
                 targets: np.ndarray, rng: np.random.Generator) -> EpisodeBatch:
    tokens, lengths = table.batch(targets)
    s_logp, s_cache = speaker_forward(speaker, tokens)
    messages = _sample(s_logp, rng)
    mask = _mask(lengths, tokens.shape[1])
    messages = np.where(mask, messages, 0)
    chosen = np.take_along_axis(s_logp, messages[..., None], -1)[..., 0] * mask
    l_logp, l_cache = listener_forward(listener, messages, lengths)
    guesses = _sample(l_logp, rng) + 1
    rewards = (guesses == targets).astype(np.float64)
    return EpisodeBatch(
        targets=targets, tokens=tokens, lengths=lengths, messages=messages, guesses=guesses,
        rewards=rewards, speaker_log_probs=chosen,
        listener_log_probs=l_logp[np.arange(len(targets)), guesses - 1],
        listener_entropy=-(np.exp(l_logp) * l_logp).sum(axis=-1),
        _caches={"speaker": (s_logp, s_cache), "listener": (l_logp, l_cache)},
    )


def play_batch(speaker: SpeakerPolicy, listener: ListenerPolicy, lexicon: Lexicon | TokenTable,
               dist: NeedDistribution, rng: np.random.Generator,
               batch_size: int = 32) -> EpisodeBatch:
    """One batch of signalling games on numerals drawn from the need distribution."""
    table = lexicon if isinstance(lexicon, TokenTable) else TokenTable.from_lexicon(lexicon, speaker.vocab)
    targets = sample_targets(dist, listener.numeral_range, batch_size, rng)
    return play_targets(speaker, listener, table, targets, rng)


def _speaker_grad(speaker, batch, s_logp, s_cache, advantage, entropy_coefficient):
    B = len(batch.targets)
    mask = _mask(batch.lengths, batch.tokens.shape[1])
    p = np.exp(s_logp)
    onehot = np.zeros_like(p)
    np.put_along_axis(onehot, batch.messages[..., None], 1.0, -1)
    d_logits = -(advantage[:, None, None] / B) * (onehot - p) * mask[..., None]
    if entropy_coefficient:
        ent = -(p * s_logp).sum(-1, keepdims=True)
        d_logits += (entropy_coefficient / B) * p * (s_logp + ent) * mask[..., None]
    d_logits_tb = d_logits.transpose(1, 0, 2)
    grad = speaker.backward(s_cache, d_logits_tb @ speaker.w_out.T)
    g = speaker.split(grad)
    H, A = speaker.hidden_dim, speaker.n_outputs
    g["w_out"][...] = s_cache["hs"].reshape(-1, H).T @ d_logits_tb.reshape(-1, A)
    g["b_out"][...] = d_logits.sum(axis=(0, 1))
    return grad


def _listener_grad(listener, batch, l_logp, l_cache, advantage, entropy_coefficient):
    B = len(batch.targets)
    p = np.exp(l_logp)
    onehot = np.zeros_like(p)
    onehot[np.arange(B), batch.guesses - 1] = 1.0
    d_logits = -(advantage[:, None] / B) * (onehot - p)
    if entropy_coefficient:
        ent = -(p * l_logp).sum(-1, keepdims=True)
        d_logits += (entropy_coefficient / B) * p * (l_logp + ent)
    hs = l_cache["hs"]
    last = hs[batch.lengths - 1, np.arange(B)]
    d_hs = np.zeros_like(hs)
    d_hs[batch.lengths - 1, np.arange(B)] = d_logits @ listener.w_out.T
    grad = listener.backward(l_cache, d_hs)
    g = listener.split(grad)
    g["w_out"][...] = last.T @ d_logits
    g["b_out"][...] = d_logits.sum(axis=0)
    return grad


def surrogate_losses(speaker, listener, batch: EpisodeBatch, entropy_coefficient: float,
                     baseline: float | None = None, speaker_entropy: float = 0.0):
    """REINFORCE surrogate losses at the current parameters for a fixed batch.

    Speaker: ``-mean((r - b) * sum_t log pi(m_t))``; listener:
    ``-mean((r - b) * log pi(guess)) - entropy_coefficient * mean(entropy)``.
    """
    b = batch.rewards.mean() if baseline is None else baseline
    adv = batch.rewards - b
    s_logp, _ = speaker_forward(speaker, batch.tokens)
    mask = _mask(batch.lengths, batch.tokens.shape[1])
    chosen = np.take_along_axis(s_logp, batch.messages[..., None], -1)[..., 0] * mask
    s_loss = -np.mean(adv * chosen.sum(axis=1))
    if speaker_entropy:
        s_ent = (-(np.exp(s_logp) * s_logp).sum(-1) * mask).sum(axis=1)
        s_loss -= speaker_entropy * s_ent.mean()
    l_logp, _ = listener_forward(listener, batch.messages, batch.lengths)
    B = len(batch.targets)
    l_loss = -np.mean(adv * l_logp[np.arange(B), batch.guesses - 1])
    l_loss -= entropy_coefficient * np.mean(-(np.exp(l_logp) * l_logp).sum(-1))
    return float(s_loss), float(l_loss)


def surrogate_gradients(speaker, listener, batch: EpisodeBatch, entropy_coefficient: float,
                        baseline: float | None = None, speaker_entropy: float = 0.0):
    """Analytic gradients of :func:`surrogate_losses` wrt both parameter vectors."""
    b = batch.rewards.mean() if baseline is None else baseline
    adv = batch.rewards - b
    s_logp, s_cache = batch._caches.get("speaker") or speaker_forward(speaker, batch.tokens)
    l_logp, l_cache = batch._caches.get("listener") or listener_forward(listener, batch.messages, batch.lengths)
    s_grad = _speaker_grad(speaker, batch, s_logp, s_cache, adv,
                           speaker_entropy)
    l_grad = _listener_grad(listener, batch, l_logp, l_cache, adv, entropy_coefficient)
    return s_grad, l_grad


class Adam:
    """Adaptive moment estimation over a flat parameter vector."""

    def __init__(self, size: int, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray):
        self.t += 1
        self.m *= self.beta1
        self.m += (1 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1 ** self.t)
        v_hat = self.v / (1 - self.beta2 ** self.t)
        theta -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class AgentPair:
    """Speaker, listener and their optimisers, created from one seed."""

    def __init__(self, config: AgentConfig, seed: int = 0, vocab: Vocabulary | None = None):
        self.config = config
        self.seed = seed
        self.vocab = vocab or Vocabulary(config.numeral_range)
        speaker_seed, listener_seed = np.random.SeedSequence(seed).spawn(2)
        self.speaker = SpeakerPolicy(self.vocab, config, np.random.default_rng(speaker_seed))
        self.listener = ListenerPolicy(config, np.random.default_rng(listener_seed))
        self.speaker_opt = Adam(self.speaker.theta.size, config.learning_rate)
        self.listener_opt = Adam(self.listener.theta.size, config.learning_rate)

    def table(self, lexicon: Lexicon) -> TokenTable:
        return TokenTable.from_lexicon(lexicon, self.vocab, self.config.numeral_range)

    def save(self, path: str | Path, extra: dict | None = None):
        header = {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "config": asdict(self.config),
            "seed": self.seed,
            "vocab_max_numeral": self.vocab.max_numeral,
            "adam_steps": [self.speaker_opt.t, self.listener_opt.t],
            "extra": extra or {},
        }
        with open(path, "wb") as fh:
            np.savez(
                fh,
                header=np.frombuffer(json.dumps(header, sort_keys=True).encode(), dtype=np.uint8),
                speaker_theta=self.speaker.theta, listener_theta=self.listener.theta,
                speaker_m=self.speaker_opt.m, speaker_v=self.speaker_opt.v,
                listener_m=self.listener_opt.m, listener_v=self.listener_opt.v,
            )

    @classmethod
    def load(cls, path: str | Path) -> tuple["AgentPair", dict]:
        with np.load(path) as data:
            header = json.loads(bytes(data["header"]).decode())
            if header.get("format") != CHECKPOINT_FORMAT:
                raise ValueError(f"{path}: not an agent checkpoint")
            if header.get("version") != CHECKPOINT_VERSION:
                raise ValueError(f"{path}: unsupported checkpoint version {header.get('version')}")
            pair = cls(AgentConfig(**header["config"]), header["seed"], Vocabulary(header["vocab_max_numeral"]))
            pair.speaker.set_theta(data["speaker_theta"])
            pair.listener.set_theta(data["listener_theta"])
            pair.speaker_opt.m[...] = data["speaker_m"]
            pair.speaker_opt.v[...] = data["speaker_v"]
            pair.listener_opt.m[...] = data["listener_m"]
            pair.listener_opt.v[...] = data["listener_v"]
        pair.speaker_opt.t, pair.listener_opt.t = header["adam_steps"]
        return pair, header.get("extra", {})


def reinforce_update(pair: AgentPair, batch: EpisodeBatch) -> dict:
    """One Adam step for each agent on the batch's REINFORCE surrogate."""
    cfg = pair.config
    s_grad, l_grad = surrogate_gradients(pair.speaker, pair.listener, batch,
                                         cfg.entropy_coefficient, speaker_entropy=cfg.speaker_entropy)
    if not (np.all(np.isfinite(s_grad)) and np.all(np.isfinite(l_grad))):
        raise FloatingPointError(
            f"non-finite gradient (speaker finite={np.isfinite(s_grad).all()}, "
            f"listener finite={np.isfinite(l_grad).all()}) at rewards mean {batch.mean_reward}"
        )
    pair.speaker_opt.step(pair.speaker.theta, s_grad)
    pair.listener_opt.step(pair.listener.theta, l_grad)
    return {
        "mean_reward": batch.mean_reward,
        "listener_entropy": float(batch.listener_entropy.mean()),
        "speaker_grad_norm": float(np.linalg.norm(s_grad)),
        "listener_grad_norm": float(np.linalg.norm(l_grad)),
    }


def greedy_accuracy(pair: AgentPair, table: TokenTable, dist: NeedDistribution) -> float:
    """Need-weighted share of numerals in range communicated correctly in greedy mode."""
    n = min(pair.config.numeral_range, dist.n_max, len(table.lengths))
    targets = np.arange(1, n + 1)
    tokens, lengths = table.batch(targets)
    s_logp, _ = speaker_forward(pair.speaker, tokens)
    messages = np.where(_mask(lengths, tokens.shape[1]), s_logp.argmax(-1), 0)
    l_logp, _ = listener_forward(pair.listener, messages, lengths)
    correct = (l_logp.argmax(-1) + 1) == targets
    w = dist.restricted(n).weights
    return float(w @ correct)


def train_steps(pair: AgentPair, table: TokenTable, dist: NeedDistribution, steps: int,
                rng: np.random.Generator) -> list[float]:
    rewards = []
    for _ in range(steps):
        batch = play_batch(pair.speaker, pair.listener, table, dist, rng, pair.config.batch_size)
        reinforce_update(pair, batch)
        rewards.append(batch.mean_reward)
    return rewards


def pretrain(pair: AgentPair, lexicon: Lexicon | TokenTable, dist: NeedDistribution, epochs: int,
             rng: np.random.Generator) -> float:
    """Train on a fixed lexicon for ``epochs`` batches; returns greedy accuracy."""
    table = lexicon if isinstance(lexicon, TokenTable) else pair.table(lexicon)
    train_steps(pair, table, dist, epochs, rng)
    return greedy_accuracy(pair, table, dist)
