#include <benchmark/benchmark.h>

#include <string>

#include "foq/analytic.hpp"
#include "foq/config.hpp"
#include "foq/control_law.hpp"
#include "foq/experiment.hpp"
#include "foq/simulator.hpp"
#include "foq/wfq.hpp"

using namespace foq;

static void BM_EventLoop(benchmark::State& state) {
  for (auto _ : state) {
    Simulator sim;
    std::int64_t fired = 0;
    for (int i = 0; i < state.range(0); ++i)
      sim.schedule_at((i * 7919) % 100'000, EventKey{i % 16, 0}, [&fired] { ++fired; });
    sim.run_until(100'000);
    benchmark::DoNotOptimize(fired);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EventLoop)->Arg(1 << 12)->Arg(1 << 16);

static void BM_PiUpdate(benchmark::State& state) {
  PiParams p;
  PiState st;
  double measured = 1.2e8;
  for (auto _ : state) {
    const PiOutput o = pi_update(st, measured, 1.1e8, p);
    st = o.state;
    st.last_drop_prob = drop_prob_from_rate(o.drop_rate, measured, st.last_drop_prob);
    measured = measured * 0.999 + 1.2e5;
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_PiUpdate);

static void BM_WfqSelect(benchmark::State& state) {
  OutPortState port;
  const auto n = static_cast<FlowId>(state.range(0));
  for (FlowId f = 0; f < n; ++f) {
    OutQueueState q;
    q.flow = f;
    q.weight = 1.0 + f % 7;
    port.queues.emplace(f, q);
  }
  auto push = [&](FlowId f) {
    OutQueueState& q = port.queues.at(f);
    Packet p;
    p.flow_id = f;
    p.size = 15;
    q.packets.push_back({p, wfq_stamp(port, q, 15)});
    q.backlog += 15;
  };
  for (FlowId f = 0; f < n; ++f) push(f);
  for (auto _ : state) {
    const FlowId f = *out_scheduler_select(port);
    wfq_take(port, f);
    push(f);
  }
}
BENCHMARK(BM_WfqSelect)->Arg(3)->Arg(64);

static void BM_ClosedForm(benchmark::State& state) {
  const StepScenario s{1.5, 0.6, 1.28, 0.2, 0.4, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(step_response_closed_form(s, 200));
}
BENCHMARK(BM_ClosedForm);

static void BM_Recurrence(benchmark::State& state) {
  const StepScenario s{1.5, 0.6, 1.28, 0.2, 0.4, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(step_response_recurrence(s, 200));
}
BENCHMARK(BM_Recurrence);

static void BM_CbrScenario(benchmark::State& state) {
  ExperimentConfig cfg = load_config(std::string(FOQ_CONFIG_DIR) + "/cbr_scaled.cfg");
  cfg.duration = 20'000'000;
  std::uint64_t events = 0;
  for (auto _ : state) events += run_experiment(cfg).events;
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CbrScenario)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
