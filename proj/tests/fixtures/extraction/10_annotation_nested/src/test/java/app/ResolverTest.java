package app;

import static org.mockito.Mockito.*;

import org.junit.jupiter.api.BeforeEach;
import org.junit.jupiter.api.Nested;
import org.junit.jupiter.api.Test;
import org.mockito.Mock;

class ResolverTest {
  @Mock private Cache cache;
  private Resolver resolver;

  @BeforeEach
  void setUp() {
    resolver = new Resolver(cache);
  }

  @Nested
  class WhenWarm {
    @BeforeEach
    void warm() {
      when(this.cache.get("k")).thenReturn("v");
    }

    @Test
    void hit() {
      resolver.resolve("k");
      verify(cache, times(0)).put("k", "v");
    }
  }
}
