/* Polynomial evaluation benchmark: degree 9, schemes naive, horner, 128 evaluations
 * per timed loop, 32-bit unsigned wrapping arithmetic, seed 0.
 * Generated by ringopt. Build with -DRINGOPT_USE_CLOCK to time with
 * clock_gettime instead of the cycle counter. */
#define _POSIX_C_SOURCE 199309L

#include <stdint.h>
#include <stdio.h>

#define ITERATIONS 128
#define REPETITIONS 64
#define SCHEMES 2

typedef uint32_t word_t;
typedef uint32_t calc_t;

#if defined(RINGOPT_USE_CLOCK) || !(defined(__x86_64__) || defined(__i386__))
#include <time.h>

static uint64_t read_counter(void)
{
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return (uint64_t)ts.tv_sec * UINT64_C(1000000000) + (uint64_t)ts.tv_nsec;
}
#else
/* rdtscp waits for all earlier instructions to complete */
static uint64_t read_counter(void)
{
  uint32_t lo, hi, aux;
  __asm__ __volatile__("rdtscp" : "=a"(lo), "=d"(hi), "=c"(aux) : : "memory");
  (void)aux;
  return ((uint64_t)hi << 32) | lo;
}
#endif

#define A0 ((calc_t)UINT64_C(2811902828))
#define A1 ((calc_t)UINT64_C(3134767159))
#define A2 ((calc_t)UINT64_C(2179114726))
#define A3 ((calc_t)UINT64_C(2409334908))
#define A4 ((calc_t)UINT64_C(839009913))
#define A5 ((calc_t)UINT64_C(2491330749))
#define A6 ((calc_t)UINT64_C(1781436988))
#define A7 ((calc_t)UINT64_C(3537070266))
#define A8 ((calc_t)UINT64_C(2122901088))
#define A9 ((calc_t)UINT64_C(3870498312))

static calc_t poly_naive(calc_t x) {
  calc_t res;

  res = A9*x*x*x*x*x*x*x*x*x + A8*x*x*x*x*x*x*x*x + A7*x*x*x*x*x*x*x + A6*x*x*x*x*x*x + A5*x*x*x*x*x + A4*x*x*x*x + A3*x*x*x + A2*x*x + A1*x + A0;

  return res;
}

static calc_t poly_horner(calc_t x) {
  calc_t res;

  res = ((((((((A9*x + A8)*x + A7)*x + A6)*x + A5)*x + A4)*x + A3)*x + A2)*x + A1)*x + A0;

  return res;
}

word_t inputs[ITERATIONS] = {
  UINT64_C(3677762627), UINT64_C(2281726703), UINT64_C(2835410419), UINT64_C(1476144619), UINT64_C(486269060), UINT64_C(1953192574), UINT64_C(4022338918), UINT64_C(603800442),
  UINT64_C(4191201306), UINT64_C(3026817064), UINT64_C(1327834582), UINT64_C(1295053178), UINT64_C(2436076869), UINT64_C(194070011), UINT64_C(200263403), UINT64_C(3709699470),
  UINT64_C(2442915534), UINT64_C(2040677453), UINT64_C(4278066543), UINT64_C(1375724172), UINT64_C(686566137), UINT64_C(1515120124), UINT64_C(3296949463), UINT64_C(4184631030),
  UINT64_C(4174305082), UINT64_C(4143300204), UINT64_C(1158403920), UINT64_C(539951342), UINT64_C(4000230133), UINT64_C(1477645080), UINT64_C(2258132415), UINT64_C(3901465159),
  UINT64_C(2260787413), UINT64_C(2408716646), UINT64_C(2084973836), UINT64_C(3903111420), UINT64_C(3926980391), UINT64_C(3399290610), UINT64_C(3436394562), UINT64_C(1603569186),
  UINT64_C(4011091264), UINT64_C(3767126775), UINT64_C(4257294654), UINT64_C(370443273), UINT64_C(3307895155), UINT64_C(646778918), UINT64_C(1627878065), UINT64_C(1008349944),
  UINT64_C(3285223923), UINT64_C(4203220523), UINT64_C(490878994), UINT64_C(3224851598), UINT64_C(273819159), UINT64_C(4160474161), UINT64_C(3105631422), UINT64_C(3221230140),
  UINT64_C(521340698), UINT64_C(3506082669), UINT64_C(4183767089), UINT64_C(3645197417), UINT64_C(3514974454), UINT64_C(3117191027), UINT64_C(2425097404), UINT64_C(1775854701),
  UINT64_C(144199934), UINT64_C(3130892277), UINT64_C(1949634677), UINT64_C(2439074936), UINT64_C(3698322508), UINT64_C(642440250), UINT64_C(901179125), UINT64_C(575209682),
  UINT64_C(928014093), UINT64_C(1227006797), UINT64_C(131085182), UINT64_C(11047144), UINT64_C(2103538826), UINT64_C(856478963), UINT64_C(140720920), UINT64_C(3993067442),
  UINT64_C(1902424177), UINT64_C(2711265657), UINT64_C(3236334686), UINT64_C(1540801391), UINT64_C(1295249816), UINT64_C(886659906), UINT64_C(564956153), UINT64_C(1583529274),
  UINT64_C(2730639327), UINT64_C(82036578), UINT64_C(3531576513), UINT64_C(464650781), UINT64_C(923950228), UINT64_C(3196604539), UINT64_C(4136382243), UINT64_C(1287159953),
  UINT64_C(1513288638), UINT64_C(1275282058), UINT64_C(2720336309), UINT64_C(571525308), UINT64_C(723705777), UINT64_C(1237057973), UINT64_C(2050722903), UINT64_C(4277690104),
  UINT64_C(838436274), UINT64_C(2322463505), UINT64_C(3627855691), UINT64_C(2180809303), UINT64_C(3360572596), UINT64_C(3647990854), UINT64_C(3970708509), UINT64_C(1403377408),
  UINT64_C(3510264585), UINT64_C(2070087457), UINT64_C(2433085763), UINT64_C(510718353), UINT64_C(1515930456), UINT64_C(4160432187), UINT64_C(3291315451), UINT64_C(2816859433),
  UINT64_C(3910384088), UINT64_C(2922889616), UINT64_C(2227616132), UINT64_C(3360073215), UINT64_C(661893699), UINT64_C(3101653995), UINT64_C(2904113391), UINT64_C(1327846377),
};

word_t results[SCHEMES][ITERATIONS];
static volatile word_t sink;

static uint64_t time_naive(void)
{
  uint64_t best = UINT64_MAX;
  int r, i;

  for (r = 0; r < REPETITIONS; r++) {
    uint64_t start, stop;
    start = read_counter();
    for (i = 0; i < ITERATIONS; i++) {
      results[0][i] = (word_t)poly_naive(inputs[i]);
    }
    stop = read_counter();
    if (stop - start < best) {
      best = stop - start;
    }
  }
  return best;
}

static uint64_t time_horner(void)
{
  uint64_t best = UINT64_MAX;
  int r, i;

  for (r = 0; r < REPETITIONS; r++) {
    uint64_t start, stop;
    start = read_counter();
    for (i = 0; i < ITERATIONS; i++) {
      results[1][i] = (word_t)poly_horner(inputs[i]);
    }
    stop = read_counter();
    if (stop - start < best) {
      best = stop - start;
    }
  }
  return best;
}

int main(void)
{
  int s, i, ok = 1;

  printf("naive,%llu\n", (unsigned long long)time_naive());
  printf("horner,%llu\n", (unsigned long long)time_horner());

  for (s = 1; s < SCHEMES; s++) {
    for (i = 0; i < ITERATIONS; i++) {
      if (results[s][i] != results[0][i]) {
        ok = 0;
      }
    }
  }
  for (i = 0; i < ITERATIONS; i++) {
    sink = results[0][i];
  }
  puts(ok ? "OK" : "MISMATCH");
  return ok ? 0 : 1;
}
