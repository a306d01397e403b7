"""
Moduł uruchamiania eksperymentów: przebiegi z ziarnami, metryki,
agregacja po przebiegach i zapis plików CSV.
"""
import logging
import threading
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple, Dict, Any

import numpy as np
import pandas as pd

from adwin import AdaptiveWindow
from base_bandits import Policy, create_base_policy
from baselines import DiscountedUCB, SlidingWindowTS, RExp3
from bandit_core import make_rng, regret_step
from config import (ExperimentConfig, BASE_POLICIES, META_POLICIES, DEFAULT_GAMMA,
                    DEFAULT_WINDOW, DEFAULT_BATCH)
from environments import (SyntheticEnvironment, StreamSpec, ReplayCursor, replay_step, load_log)
from exceptions import ConfigurationError, OperationCancelledError
from meta_bandits import META_CLASSES, MetaBandit
from models import RunRecord, ReplayLog

RAW_COLUMNS = ["policy", "run", "t", "metric", "value"]
SUMMARY_COLUMNS = ["policy", "t", "metric", "mean", "std"]
TABLE_DELTAS = (0.1, 0.01, 0.001, 0.0001)


def create_policy(name: str, n_arms: int, n_plays: int, horizon: int,
                  config: ExperimentConfig) -> Policy:
    """
    Tworzy politykę po nazwie z rejestru.

    Args:
        name: Nazwa (ts, klucb, eucb, adr-*, ads-*, ducb, swts, rexp3)
        n_arms: Liczba ramion K
        n_plays: Liczba zagrań L
        horizon: Horyzont T (dla Elimination-UCB)
        config: Konfiguracja z hiperparametrami

    Returns:
        Nowa polityka

    Raises:
        ConfigurationError: nieznana nazwa polityki
    """
    if name in BASE_POLICIES:
        return create_base_policy(name, n_arms, n_plays, horizon)
    if name in META_POLICIES:
        mode, base_name = name.split("-", 1)
        base = create_base_policy(base_name, n_arms, n_plays, horizon)
        return META_CLASSES[mode](
            base,
            delta=config.policy_delta(),
            check_stride=config.param_int("check_stride", config.check_stride),
        )
    if name == "ducb":
        return DiscountedUCB(n_arms, n_plays, gamma=config.param_float("gamma", DEFAULT_GAMMA))
    if name == "swts":
        return SlidingWindowTS(n_arms, n_plays, window=config.param_int("window", DEFAULT_WINDOW))
    if name == "rexp3":
        return RExp3(n_arms, n_plays, batch=config.param_int("batch", DEFAULT_BATCH))
    raise ConfigurationError(f"policy: nieznana polityka '{name}'")


def run_synthetic(config: ExperimentConfig, policy: Policy, env: SyntheticEnvironment,
                  run_index: int) -> RunRecord:
    """
    Jeden przebieg na środowisku syntetycznym; metryką jest skumulowany regret.

    Args:
        config: Konfiguracja eksperymentu
        policy: Świeża polityka
        env: Środowisko
        run_index: Numer przebiegu (ziarno = seed + run_index)

    Returns:
        Zapis przebiegu
    """
    rng = make_rng(config.seed + run_index)
    cadence = config.effective_cadence(env.horizon)
    record = RunRecord(policy=policy.name, run=run_index, metric="regret",
                       selections=[] if config.record_selections else None)
    is_meta = isinstance(policy, MetaBandit)
    regret = 0.0

    for t in range(1, env.horizon + 1):
        selection = policy.select(t, rng)
        outcome = env.play(t, selection, rng)
        policy.update(t, outcome)
        regret += regret_step(env.means_at(t), selection)
        if is_meta and policy.last_detection is not None:
            record.reset_rounds.append(t)
        if record.selections is not None:
            record.selections.append(selection.arms)
        if t % cadence == 0 or t == env.horizon:
            record.add_point(t, regret)

    record.rounds_completed = env.horizon
    return record


def run_replay(config: ExperimentConfig, policy: Policy, log: ReplayLog,
               run_index: int) -> RunRecord:
    """
    Jeden przebieg ewaluacji offline; metryką jest skumulowana nagroda.

    Polityka wybiera ramiona dla każdego zdarzenia; przy braku dopasowania
    zdarzenie jest pomijane, a runda polityki nie postępuje. Przebieg kończy
    się po wyczerpaniu logu albo po `replay_limit` rundach, jeśli podano limit.
    """
    rng = make_rng(config.seed + run_index)
    limit = config.replay_rounds(len(log))
    cadence = config.effective_cadence(min(limit, len(log)))
    record = RunRecord(policy=policy.name, run=run_index, metric="reward",
                       selections=[] if config.record_selections else None)
    is_meta = isinstance(policy, MetaBandit)
    cursor = ReplayCursor(log)
    reward = 0.0
    t = 1

    while t <= limit and not cursor.exhausted:
        selection = policy.select(t, rng)
        outcome = replay_step(cursor, selection)
        if outcome is None:
            continue
        policy.update(t, outcome)
        reward += outcome.reward_sum
        if is_meta and policy.last_detection is not None:
            record.reset_rounds.append(t)
        if record.selections is not None:
            record.selections.append(selection.arms)
        if t % cadence == 0:
            record.add_point(t, reward)
        t += 1

    record.rounds_completed = cursor.rounds
    record.skips = cursor.skips
    record.exhausted = cursor.exhausted
    if not record.times or record.times[-1] != cursor.rounds:
        record.add_point(cursor.rounds, reward)
    if not cursor.exhausted:
        logging.warning(f"{policy.name}/przebieg {run_index}: zatrzymano po {cursor.rounds} rundach, "
                        f"nieużyte zdarzenia logu: {len(log) - cursor.position}")
    elif config.replay_limit is not None and cursor.rounds < config.replay_limit:
        logging.warning(f"{policy.name}/przebieg {run_index}: log wyczerpany po "
                        f"{cursor.rounds} rundach ({cursor.skips} pominięć)")
    else:
        logging.debug(f"{policy.name}/przebieg {run_index}: log wyczerpany po "
                      f"{cursor.rounds} rundach ({cursor.skips} pominięć)")
    return record


def run_single(config: ExperimentConfig, policy_name: str, run_index: int,
               log: Optional[ReplayLog] = None, policy: Optional[Policy] = None) -> RunRecord:
    """
    Wykonuje pojedynczy przebieg dla polityki.

    Args:
        config: Konfiguracja eksperymentu
        policy_name: Nazwa polityki z rejestru
        run_index: Numer przebiegu
        log: Wczytany log (dla środowiska replay)
        policy: Gotowa polityka zamiast tworzenia z rejestru

    Returns:
        Zapis przebiegu
    """
    if config.is_replay:
        if log is None:
            log = load_log(config.replay_path)
        n_arms = max(log.n_arms, 1)
        if config.n_plays > n_arms:
            raise ConfigurationError(f"L: musi spełniać L <= K={n_arms} (słownik logu)")
        if policy is None:
            policy = create_policy(policy_name, n_arms, config.n_plays, max(len(log), 1), config)
        return run_replay(config, policy, log, run_index)

    env = SyntheticEnvironment(config.env, config.n_arms, config.horizon)
    if policy is None:
        policy = create_policy(policy_name, config.n_arms, config.n_plays, config.horizon, config)
    return run_synthetic(config, policy, env, run_index)


def _run_job(job: Tuple[Dict[str, Any], str, int, Optional[ReplayLog]]) -> RunRecord:
    config_dict, policy_name, run_index, log = job
    return run_single(ExperimentConfig.from_dict(config_dict), policy_name, run_index, log=log)


def run_experiment(config: ExperimentConfig,
                   stop_event: Optional[threading.Event] = None) -> List[RunRecord]:
    """
    Wykonuje `runs` niezależnych przebiegów dla każdej polityki.

    Przebiegi mogą iść równolegle (workers > 1); wyniki są porządkowane po
    polityce i numerze przebiegu, więc nie zależą od kolejności wykonania.

    Args:
        config: Konfiguracja eksperymentu
        stop_event: Zdarzenie anulowania sprawdzane między przebiegami

    Returns:
        Lista zapisów przebiegów

    Raises:
        ConfigurationError: niepoprawna konfiguracja
        OperationCancelledError: eksperyment anulowany
    """
    config.validate()
    log = load_log(config.replay_path) if config.is_replay else None
    jobs = [(policy_name, run_index) for policy_name in config.policies
            for run_index in range(config.runs)]

    logging.info(f"=== START eksperymentu: env={config.env}, polityki={','.join(config.policies)}, "
                 f"K={log.n_arms if log is not None else config.n_arms}, "
                 f"T={config.replay_rounds(len(log)) if log is not None else config.horizon}, "
                 f"L={config.n_plays}, przebiegi={config.runs} ===")

    records: List[RunRecord] = []
    if config.workers == 1:
        for policy_name, run_index in jobs:
            if stop_event and stop_event.is_set():
                raise OperationCancelledError("Eksperyment anulowany przez użytkownika")
            record = run_single(config, policy_name, run_index, log=log)
            logging.info(f"{record.policy}/przebieg {run_index}: {record.metric}={record.final_value:.3f}, "
                         f"resety={len(record.reset_rounds)}")
            records.append(record)
    else:
        config_dict = config.to_dict()
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            futures = [executor.submit(_run_job, (config_dict, policy_name, run_index, log))
                       for policy_name, run_index in jobs]
            for future in futures:
                if stop_event and stop_event.is_set():
                    for pending in futures:
                        pending.cancel()
                    raise OperationCancelledError("Eksperyment anulowany przez użytkownika")
                records.append(future.result())

    order = {name: i for i, name in enumerate(config.policies)}
    records.sort(key=lambda r: (order.get(r.policy, len(order)), r.run))
    _log_summary(records)
    logging.info("=== KONIEC eksperymentu ===")
    return records


def _log_summary(records: List[RunRecord]) -> None:
    by_policy: Dict[str, List[RunRecord]] = {}
    for record in records:
        by_policy.setdefault(record.policy, []).append(record)
    for name, group in by_policy.items():
        final = np.mean([r.final_value for r in group])
        resets = np.mean([len(r.reset_rounds) for r in group])
        logging.info(f"Podsumowanie {name}: średni {group[0].metric}={final:.3f}, średnio resetów={resets:.2f}")


def records_to_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    """Wiersze `policy,run,t,metric,value` dla wszystkich przebiegów."""
    rows = []
    for record in records:
        rows.extend(record.to_rows())
    return pd.DataFrame(rows, columns=RAW_COLUMNS)


def aggregate(records: Sequence[RunRecord], n_plays: int = 1) -> pd.DataFrame:
    """
    Średnia i odchylenie standardowe (populacyjne) po przebiegach.

    Args:
        records: Zapisy przebiegów
        n_plays: L, do metryki regret_per_play

    Returns:
        Ramka `policy,t,metric,mean,std`
    """
    frame = records_to_frame(records)
    if frame.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    regret = frame[frame["metric"] == "regret"]
    if not regret.empty:
        per_play = regret.assign(metric="regret_per_play", value=regret["value"] / n_plays)
        frame = pd.concat([frame, per_play], ignore_index=True)
    policy_order = list(dict.fromkeys(frame["policy"]))
    summary = (frame.groupby(["policy", "t", "metric"], sort=False)["value"]
               .agg(mean="mean", std=lambda v: float(np.std(v.to_numpy(), ddof=0)))
               .reset_index())
    summary["policy"] = pd.Categorical(summary["policy"], categories=policy_order, ordered=True)
    summary = summary.sort_values(["policy", "metric", "t"], kind="stable").reset_index(drop=True)
    summary["policy"] = summary["policy"].astype(str)
    return summary[SUMMARY_COLUMNS]


def summary_path_for(out: str) -> str:
    """Domyślna ścieżka podsumowania: <nazwa>_summary.csv."""
    if out.endswith(".csv"):
        return out[:-4] + "_summary.csv"
    return out + "_summary.csv"


def write_outputs(records: Sequence[RunRecord], config: ExperimentConfig,
                  float_format: Optional[str] = None) -> Tuple[str, str]:
    """
    Zapisuje surowe wiersze i podsumowanie do plików CSV.

    Returns:
        Ścieżki (surowe, podsumowanie)

    Raises:
        ConfigurationError: brak ścieżki wyjściowej
    """
    if not config.out:
        raise ConfigurationError("out: nie podano ścieżki pliku wyjściowego")
    summary_out = config.summary_out or summary_path_for(config.out)
    records_to_frame(records).to_csv(config.out, index=False, lineterminator='\n',
                                     float_format=float_format)
    aggregate(records, config.n_plays).to_csv(summary_out, index=False, lineterminator='\n',
                                              float_format=float_format)
    logging.info(f"Zapisano wyniki: {config.out}, {summary_out}")
    return config.out, summary_out


def run_delta_sweep(config: ExperimentConfig, deltas: Sequence[float] = TABLE_DELTAS,
                    stop_event: Optional[threading.Event] = None) -> pd.DataFrame:
    """
    Powtarza eksperyment dla kolejnych wartości δ.

    Returns:
        Podsumowanie z dodatkową kolumną `delta`
    """
    frames = []
    for delta in deltas:
        swept = config.merged({"delta": delta, "params": {"delta": str(delta)}})
        logging.info(f"Przegląd δ: {delta}")
        records = run_experiment(swept, stop_event=stop_event)
        summary = aggregate(records, swept.n_plays)
        summary.insert(0, "delta", delta)
        frames.append(summary)
    return pd.concat(frames, ignore_index=True)


def run_adwin_stream(values: Sequence[float], delta: float, check_stride: int = 1,
                     horizon: Optional[int] = None) -> pd.DataFrame:
    """
    Przepuszcza strumień przez samodzielny ADWIN.

    Returns:
        Ramka `t,estimate,detected,window_size`

    Raises:
        UsageError: strumień dłuższy niż horizon
    """
    detector = AdaptiveWindow(delta, check_stride=check_stride, horizon=horizon)
    rows = []
    for x in values:
        report = detector.observe(float(x))
        rows.append((detector.t, detector.mean_estimate(), int(report.detected), report.retained_size))
    return pd.DataFrame(rows, columns=["t", "estimate", "detected", "window_size"])


def _stream_error(job: Tuple[StreamSpec, float, int, int]) -> float:
    stream, delta, seed, check_stride = job
    rng = make_rng(seed)
    values = stream.generate(rng)
    means = stream.means()
    detector = AdaptiveWindow(delta, check_stride=check_stride)
    error = 0.0
    for x, mu in zip(values, means):
        detector.observe(float(x))
        error += abs(detector.mean_estimate() - mu)
    return error


def adwin_error_experiment(stream: StreamSpec, delta: float, runs: int, seed: int = 0,
                           check_stride: int = 1, workers: int = 1) -> np.ndarray:
    """
    Całkowity błąd estymatora Err(T) = Σ_t |μ̂_W(t) − μ_t| dla `runs` strumieni.

    Estymata w rundzie t jest liczona po obserwacji x_t.

    Args:
        stream: Opis strumienia
        delta: Poziom ufności
        runs: Liczba przebiegów (ziarna seed + numer przebiegu)
        seed: Ziarno bazowe
        check_stride: Co który punkt podziału sprawdzać
        workers: Liczba procesów

    Returns:
        Tablica Err(T) dla kolejnych przebiegów
    """
    if runs < 1:
        raise ConfigurationError(f"runs: musi być >= 1, podano {runs}")
    jobs = [(stream, delta, seed + run, check_stride) for run in range(runs)]
    if workers == 1:
        errors = [_stream_error(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            errors = list(executor.map(_stream_error, jobs))
    result = np.asarray(errors, dtype=np.float64)
    logging.info(f"Err(T) dla strumienia {stream.kind} (T={stream.horizon}, δ={delta}): "
                 f"średnia {result.mean():.2f}, maks. {result.max():.2f}")
    return result


def error_slope(change_counts: Sequence[int], mean_errors: Sequence[float]) -> float:
    """Nachylenie regresji log Err względem log M."""
    slope, _ = np.polyfit(np.log(np.asarray(change_counts, dtype=np.float64)),
                          np.log(np.asarray(mean_errors, dtype=np.float64)), 1)
    return float(slope)
